#include "psurr/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "psurr/csv.hpp"

namespace psurr {

namespace {

constexpr const char* kMagic = "psurr-checkpoint";
constexpr int kVersion = 1;

[[noreturn]] void fail(const std::string& what) { throw std::runtime_error("checkpoint: " + what); }

void expect_word(std::istream& in, const std::string& word) {
  std::string got;
  if (!(in >> got) || got != word) fail("expected '" + word + "', got '" + got + "'");
}

template <typename T>
T read_number(std::istream& in, const std::string& what) {
  std::string tok;
  if (!(in >> tok)) fail("truncated while reading " + what);
  T v{};
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) fail("bad number '" + tok + "' in " + what);
  return v;
}

void write_header(std::ostream& out, const char* kind, const MlpParams& net) {
  out << kMagic << ' ' << kVersion << '\n';
  out << "kind " << kind << '\n';
  out << "activation " << to_string(net.activation) << '\n';
  out << "layer_sizes " << net.layer_sizes.size();
  for (int s : net.layer_sizes) out << ' ' << s;
  out << '\n';
}

void write_values(std::ostream& out, const Vector& values) {
  out << "values " << values.size() << '\n';
  for (double v : values) out << format_double(v) << '\n';
}

struct Header {
  std::string kind;
  Activation activation;
  std::vector<int> layer_sizes;
};

Header read_header(std::istream& in) {
  expect_word(in, kMagic);
  if (read_number<int>(in, "version") != kVersion) fail("unsupported version");
  Header h;
  expect_word(in, "kind");
  in >> h.kind;
  expect_word(in, "activation");
  std::string act;
  in >> act;
  try {
    h.activation = parse_activation(act);
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  expect_word(in, "layer_sizes");
  const auto n = read_number<int>(in, "layer count");
  if (n < 2 || n > 64) fail("implausible layer count");
  for (int i = 0; i < n; ++i) h.layer_sizes.push_back(read_number<int>(in, "layer size"));
  return h;
}

Vector read_values(std::istream& in, std::size_t expected) {
  expect_word(in, "values");
  const auto n = read_number<std::size_t>(in, "value count");
  if (n != expected) fail("value count " + std::to_string(n) + " does not match shape (" + std::to_string(expected) + ")");
  Vector v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = read_number<double>(in, "values");
  return v;
}

}  // namespace

void save_policy(std::ostream& out, const GaussianPolicy& policy) {
  write_header(out, "policy", policy.net());
  out << "state_dependent_std " << (policy.config().state_dependent_std ? 1 : 0) << '\n';
  out << "log_std " << policy.free_log_std().size() << '\n';
  write_values(out, policy.flat_params());
}

GaussianPolicy load_policy(std::istream& in) {
  const Header h = read_header(in);
  if (h.kind != "policy") fail("expected a policy checkpoint, got '" + h.kind + "'");
  expect_word(in, "state_dependent_std");
  const bool sds = read_number<int>(in, "state_dependent_std") != 0;
  expect_word(in, "log_std");
  const auto n_log_std = read_number<std::size_t>(in, "log_std");

  PolicyConfig cfg;
  cfg.state_dim = h.layer_sizes.front();
  cfg.action_dim = sds ? h.layer_sizes.back() / 2 : h.layer_sizes.back();
  cfg.hidden.assign(h.layer_sizes.begin() + 1, h.layer_sizes.end() - 1);
  cfg.activation = h.activation;
  cfg.state_dependent_std = sds;
  if (n_log_std != (sds ? 0u : static_cast<std::size_t>(cfg.action_dim))) fail("log_std size does not match shape");

  try {
    GaussianPolicy p = GaussianPolicy::zeros(cfg);
    p.set_flat_params(read_values(in, mlp_param_count(h.layer_sizes) + n_log_std));
    return p;
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
}

void save_value(std::ostream& out, const ValueParams& value) {
  write_header(out, "value", value);
  write_values(out, value.values);
}

ValueParams load_value(std::istream& in) {
  const Header h = read_header(in);
  if (h.kind != "value") fail("expected a value checkpoint, got '" + h.kind + "'");
  try {
    ValueParams v = MlpParams::zeros(h.layer_sizes, h.activation);
    v.values = read_values(in, v.param_count());
    return v;
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
}

void save_policy_file(const std::string& path, const GaussianPolicy& policy) {
  std::ofstream out(path);
  if (!out) fail("cannot write '" + path + "'");
  save_policy(out, policy);
}

GaussianPolicy load_policy_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");
  return load_policy(in);
}

void save_value_file(const std::string& path, const ValueParams& value) {
  std::ofstream out(path);
  if (!out) fail("cannot write '" + path + "'");
  save_value(out, value);
}

ValueParams load_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");
  return load_value(in);
}

}  // namespace psurr
