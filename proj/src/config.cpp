#include "psurr/config.hpp"

#include <fstream>
#include <set>

namespace psurr {

namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "env",          "variant",        "epsilon",        "eta",
      "beta",         "gamma",          "lambda",         "polyak_tau",
      "learning_rate", "value_learning_rate", "rollout_len", "epochs_per_rollout",
      "minibatch_size", "total_steps",  "entropy_gain",   "seed",
      "eval_every",   "eval_episodes",  "hidden",         "activation",
      "state_dependent_std", "init_log_std", "normalize_advantages", "grad_clip",
      "max_ratio",    "td_gain"};
  return keys;
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(key, "has the wrong type (" + std::string(it->type_name()) + ")");
  }
}

template <typename Parse>
void read_enum(const json& j, const char* key, Parse parse) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_string()) throw ConfigError(key, "must be a string");
  try {
    parse(it->get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
}

}  // namespace

json config_to_json(const TrainerConfig& c) {
  return json{
      {"env", std::string(to_string(c.env.name))},
      {"variant", std::string(to_string(c.surrogate.variant))},
      {"epsilon", c.surrogate.epsilon},
      {"eta", c.surrogate.eta},
      {"beta", c.surrogate.beta},
      {"gamma", c.gae.gamma},
      {"lambda", c.gae.lambda},
      {"polyak_tau", c.gae.polyak_tau},
      {"learning_rate", c.learning_rate},
      {"value_learning_rate", c.value_learning_rate},
      {"rollout_len", c.rollout_len},
      {"epochs_per_rollout", c.epochs_per_rollout},
      {"minibatch_size", c.minibatch_size},
      {"total_steps", c.total_steps},
      {"entropy_gain", c.entropy_gain},
      {"seed", c.seed},
      {"eval_every", c.eval_every},
      {"eval_episodes", c.eval_episodes},
      {"hidden", c.hidden},
      {"activation", std::string(to_string(c.activation))},
      {"state_dependent_std", c.state_dependent_std},
      {"init_log_std", c.init_log_std},
      {"normalize_advantages", c.normalize_advantages},
      {"grad_clip", c.grad_clip},
      {"max_ratio", c.max_ratio},
      {"td_gain", c.td_gain},
  };
}

TrainerConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known_keys().count(key)) throw ConfigError(key, "unknown configuration key");
  }
  TrainerConfig c;
  read_enum(j, "env", [&](const std::string& s) { c.env = EnvSpec::make(parse_env_name(s)); });
  read_enum(j, "variant", [&](const std::string& s) { c.surrogate.variant = parse_variant(s); });
  read_enum(j, "activation", [&](const std::string& s) { c.activation = parse_activation(s); });
  read(j, "epsilon", c.surrogate.epsilon);
  read(j, "eta", c.surrogate.eta);
  read(j, "beta", c.surrogate.beta);
  read(j, "gamma", c.gae.gamma);
  read(j, "lambda", c.gae.lambda);
  read(j, "polyak_tau", c.gae.polyak_tau);
  read(j, "learning_rate", c.learning_rate);
  read(j, "value_learning_rate", c.value_learning_rate);
  read(j, "rollout_len", c.rollout_len);
  read(j, "epochs_per_rollout", c.epochs_per_rollout);
  read(j, "minibatch_size", c.minibatch_size);
  read(j, "total_steps", c.total_steps);
  read(j, "entropy_gain", c.entropy_gain);
  read(j, "seed", c.seed);
  read(j, "eval_every", c.eval_every);
  read(j, "eval_episodes", c.eval_episodes);
  read(j, "hidden", c.hidden);
  read(j, "state_dependent_std", c.state_dependent_std);
  read(j, "init_log_std", c.init_log_std);
  read(j, "normalize_advantages", c.normalize_advantages);
  read(j, "grad_clip", c.grad_clip);
  read(j, "max_ratio", c.max_ratio);
  read(j, "td_gain", c.td_gain);
  try {
    c.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    const auto colon = msg.find(':');
    throw ConfigError(colon == std::string::npos ? "<config>" : msg.substr(0, colon),
                      colon == std::string::npos ? msg : msg.substr(colon + 2));
  }
  return c;
}

TrainerConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("parse error: ") + e.what());
  }
  return config_from_json(j);
}

void apply_override(json& j, std::string_view key, std::string_view value) {
  const std::string k(key);
  if (!known_keys().count(k)) throw ConfigError(k, "unknown configuration key");
  json parsed = json::parse(value, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) {
    j[k] = std::string(value);
  } else {
    j[k] = std::move(parsed);
  }
}

}  // namespace psurr
