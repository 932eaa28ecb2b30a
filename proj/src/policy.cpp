#include "psurr/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace psurr {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5*ln(2*pi)
// Keeps squashed actions representable as strictly interior doubles.
constexpr double kActionBound = 1.0 - 1e-9;

std::vector<int> net_sizes(const PolicyConfig& c) {
  std::vector<int> sizes{c.state_dim};
  sizes.insert(sizes.end(), c.hidden.begin(), c.hidden.end());
  sizes.push_back(c.state_dependent_std ? 2 * c.action_dim : c.action_dim);
  return sizes;
}

void check_config(const PolicyConfig& c) {
  if (c.state_dim <= 0 || c.action_dim <= 0) throw std::invalid_argument("policy dimensions must be positive");
  if (c.init_log_std < kLogStdMin || c.init_log_std > kLogStdMax) {
    throw std::invalid_argument("init_log_std outside the clamp range [-5, 2]");
  }
}

double clamp_log_std(double v) { return std::clamp(v, kLogStdMin, kLogStdMax); }
bool log_std_active(double v) { return v > kLogStdMin && v < kLogStdMax; }

// ln(1 - tanh(x)^2) evaluated from the action a = tanh(x).
double log_squash_jacobian(double a) { return std::log((1.0 - a) * (1.0 + a)); }

}  // namespace

GaussianPolicy::GaussianPolicy(PolicyConfig config, MlpParams net, Vector log_std)
    : config_(std::move(config)), net_(std::move(net)), log_std_(std::move(log_std)) {
  check_config(config_);
  if (net_.layer_sizes != net_sizes(config_)) throw std::invalid_argument("policy network shape does not match config");
  const Eigen::Index expect = config_.state_dependent_std ? 0 : config_.action_dim;
  if (log_std_.size() != expect) throw std::invalid_argument("policy log_std has the wrong size");
}

GaussianPolicy GaussianPolicy::init(const PolicyConfig& config, Rng& rng) {
  check_config(config);
  MlpParams net = MlpParams::random(net_sizes(config), config.activation, rng, 0.01);
  Vector log_std;
  if (config.state_dependent_std) {
    net.bias(net.num_layers() - 1).tail(config.action_dim).setConstant(config.init_log_std);
  } else {
    log_std = Vector::Constant(config.action_dim, config.init_log_std);
  }
  return GaussianPolicy(config, std::move(net), std::move(log_std));
}

GaussianPolicy GaussianPolicy::zeros(const PolicyConfig& config) {
  check_config(config);
  MlpParams net = MlpParams::zeros(net_sizes(config), config.activation);
  Vector log_std;
  if (config.state_dependent_std) {
    net.bias(net.num_layers() - 1).tail(config.action_dim).setConstant(config.init_log_std);
  } else {
    log_std = Vector::Constant(config.action_dim, config.init_log_std);
  }
  return GaussianPolicy(config, std::move(net), std::move(log_std));
}

std::size_t GaussianPolicy::param_count() const {
  return net_.param_count() + static_cast<std::size_t>(log_std_.size());
}

Vector GaussianPolicy::flat_params() const {
  Vector theta(static_cast<Eigen::Index>(param_count()));
  theta << net_.values, log_std_;
  return theta;
}

void GaussianPolicy::set_flat_params(const Vector& theta) {
  if (static_cast<std::size_t>(theta.size()) != param_count()) {
    throw std::invalid_argument("set_flat_params: size mismatch");
  }
  net_.values = theta.head(net_.values.size());
  log_std_ = theta.tail(log_std_.size());
}

GaussianHead forward(const GaussianPolicy& policy, const Vector& state) {
  const Vector out = mlp_forward(policy.net(), state);
  const int d = policy.config().action_dim;
  GaussianHead head;
  head.mean = out.head(d);
  const Vector raw = policy.config().state_dependent_std ? Vector(out.tail(d)) : policy.free_log_std();
  head.log_std = raw.unaryExpr(&clamp_log_std);
  return head;
}

ActionSample sample(const GaussianHead& head, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ActionSample s;
  s.action.resize(head.mean.size());
  for (Eigen::Index i = 0; i < head.mean.size(); ++i) {
    const double pre = head.mean[i] + std::exp(head.log_std[i]) * normal(rng);
    s.action[i] = std::clamp(std::tanh(pre), -kActionBound, kActionBound);
  }
  s.log_prob = log_prob(head, s.action);
  return s;
}

double log_prob(const GaussianHead& head, const Vector& action) {
  if (action.size() != head.mean.size()) throw std::invalid_argument("log_prob: action dimension mismatch");
  double lp = 0.0;
  for (Eigen::Index i = 0; i < action.size(); ++i) {
    const double a = action[i];
    if (!(a > -1.0 && a < 1.0)) throw std::domain_error("log_prob: action component outside (-1, 1)");
    const double z = (std::atanh(a) - head.mean[i]) * std::exp(-head.log_std[i]);
    lp += -0.5 * z * z - head.log_std[i] - kHalfLog2Pi - log_squash_jacobian(a);
  }
  return lp;
}

double entropy_bonus(const GaussianHead& head) {
  return head.log_std.sum() + static_cast<double>(head.log_std.size()) * (0.5 + kHalfLog2Pi);
}

PolicyPass policy_forward(const GaussianPolicy& policy, const Vector& state, const Vector& action) {
  const PolicyConfig& cfg = policy.config();
  const int d = cfg.action_dim;
  PolicyPass pass;
  const Vector out = mlp_forward(policy.net(), state, &pass.cache);
  pass.raw_log_std = cfg.state_dependent_std ? Vector(out.tail(d)) : policy.free_log_std();
  pass.head = {out.head(d), pass.raw_log_std.unaryExpr(&clamp_log_std)};
  pass.terms = {log_prob(pass.head, action), entropy_bonus(pass.head)};
  pass.z.resize(d);
  for (int i = 0; i < d; ++i) {
    pass.z[i] = (std::atanh(action[i]) - pass.head.mean[i]) * std::exp(-pass.head.log_std[i]);
  }
  return pass;
}

void policy_backward(const GaussianPolicy& policy, const PolicyPass& pass, double logp_coef,
                     double entropy_coef, Eigen::Ref<Vector> grad) {
  if (static_cast<std::size_t>(grad.size()) != policy.param_count()) {
    throw std::invalid_argument("policy_backward: gradient size mismatch");
  }
  const PolicyConfig& cfg = policy.config();
  const int d = cfg.action_dim;
  Vector g_mean(d), g_log_std(d);
  for (int i = 0; i < d; ++i) {
    const double z = pass.z[i];
    // d ln pi / d mean = z/std, d ln pi / d log_std = z^2 - 1, d H / d log_std = 1
    g_mean[i] = logp_coef * z * std::exp(-pass.head.log_std[i]);
    g_log_std[i] = log_std_active(pass.raw_log_std[i]) ? logp_coef * (z * z - 1.0) + entropy_coef : 0.0;
  }
  auto g_net = grad.head(static_cast<Eigen::Index>(policy.net().param_count()));
  if (cfg.state_dependent_std) {
    Vector g_out(2 * d);
    g_out << g_mean, g_log_std;
    mlp_backward(policy.net(), pass.cache, g_out, g_net);
  } else {
    mlp_backward(policy.net(), pass.cache, g_mean, g_net);
    grad.tail(d) += g_log_std;
  }
}

PolicyTerms accumulate_policy_grad(const GaussianPolicy& policy, const Vector& state,
                                   const Vector& action, double logp_coef, double entropy_coef,
                                   Eigen::Ref<Vector> grad) {
  const PolicyPass pass = policy_forward(policy, state, action);
  policy_backward(policy, pass, logp_coef, entropy_coef, grad);
  return pass.terms;
}

Vector grad_log_prob(const GaussianPolicy& policy, const Vector& state, const Vector& action) {
  Vector grad = Vector::Zero(static_cast<Eigen::Index>(policy.param_count()));
  accumulate_policy_grad(policy, state, action, 1.0, 0.0, grad);
  return grad;
}

double PolicySnapshot::log_prob(const Vector& state, const Vector& action) const {
  return psurr::log_prob(forward(policy_, state), action);
}

PolicySnapshot snapshot(const GaussianPolicy& policy) { return PolicySnapshot(policy); }

void update_baseline(PolicySnapshot& baseline, const GaussianPolicy& policy) {
  baseline = PolicySnapshot(policy);
}

}  // namespace psurr
