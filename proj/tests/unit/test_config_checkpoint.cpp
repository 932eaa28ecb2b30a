#include <random>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

#include "psurr/checkpoint.hpp"
#include "psurr/config.hpp"

namespace psurr {
namespace {

using nlohmann::json;

TEST(Config, JsonRoundTrip) {
  TrainerConfig c;
  c.env = EnvSpec::make(EnvName::bandit2);
  c.surrogate.variant = Variant::ppo_rb;
  c.surrogate.eta = 0.3;
  c.hidden = {32, 16};
  c.activation = Activation::swish;
  c.seed = 12;
  c.normalize_advantages = true;
  const json j = config_to_json(c);
  const TrainerConfig back = config_from_json(j);
  EXPECT_EQ(config_to_json(back), j);
  EXPECT_EQ(back.env.name, EnvName::bandit2);
  EXPECT_EQ(back.hidden, c.hidden);
}

TEST(Config, MissingKeysKeepDefaults) {
  const TrainerConfig c = config_from_json(json{{"variant", "ppo_clip"}});
  EXPECT_EQ(c.surrogate.variant, Variant::ppo_clip);
  EXPECT_EQ(c.rollout_len, TrainerConfig{}.rollout_len);
}

TEST(Config, ErrorsNameTheField) {
  auto field_of = [](const json& j) {
    try {
      config_from_json(j);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  EXPECT_EQ(field_of(json{{"bogus", 1}}), "bogus");
  EXPECT_EQ(field_of(json{{"epsilon", "big"}}), "epsilon");
  EXPECT_EQ(field_of(json{{"td_gain", 0.1}}), "td_gain");
  EXPECT_EQ(field_of(json{{"variant", "nope"}}), "variant");
  EXPECT_EQ(field_of(json{{"env", "mars"}}), "env");
  EXPECT_EQ(field_of(json{{"variant", "ppo_clip"}, {"eta", 0.2}}), "surrogate");
  EXPECT_EQ(field_of(json{{"rollout_len", 0}}), "rollout_len");
}

TEST(Config, Overrides) {
  json j = json::object();
  apply_override(j, "epsilon", "0.2");
  apply_override(j, "variant", "ppo_clip");
  apply_override(j, "hidden", "[8,8]");
  const TrainerConfig c = config_from_json(j);
  EXPECT_EQ(c.surrogate.epsilon, 0.2);
  EXPECT_EQ(c.surrogate.variant, Variant::ppo_clip);
  EXPECT_EQ(c.hidden, (std::vector<int>{8, 8}));
}

TEST(Config, LoadFileErrors) {
  EXPECT_THROW(load_config_file("/nonexistent/psurr.json"), ConfigError);
}

GaussianPolicy random_policy(bool state_dependent) {
  PolicyConfig c;
  c.state_dim = 3;
  c.action_dim = 2;
  c.hidden = {5, 4};
  c.activation = Activation::swish;
  c.state_dependent_std = state_dependent;
  c.init_log_std = -0.5;
  Rng rng(77);
  GaussianPolicy p = GaussianPolicy::init(c, rng);
  Vector theta = p.flat_params();
  std::normal_distribution<double> n(0.0, 1.0);
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] = n(rng) / 3.0;
  p.set_flat_params(theta);
  return p;
}

TEST(Checkpoint, PolicyRoundTripIsExact) {
  for (bool sd : {false, true}) {
    const GaussianPolicy p = random_policy(sd);
    std::stringstream ss;
    save_policy(ss, p);
    const GaussianPolicy q = load_policy(ss);
    EXPECT_EQ(q.flat_params(), p.flat_params());
    EXPECT_EQ(q.config().hidden, p.config().hidden);
    EXPECT_EQ(q.config().state_dependent_std, sd);
    EXPECT_EQ(q.config().activation, Activation::swish);
    const Vector s{{0.1, -0.4, 2.0}};
    EXPECT_EQ(forward(q, s).mean, forward(p, s).mean);
  }
}

TEST(Checkpoint, ValueRoundTripIsExact) {
  Rng rng(3);
  const ValueParams v = make_value_params(4, {6}, Activation::tanh, rng);
  std::stringstream ss;
  save_value(ss, v);
  const ValueParams w = load_value(ss);
  EXPECT_EQ(w.values, v.values);
  EXPECT_EQ(w.layer_sizes, v.layer_sizes);
}

TEST(Checkpoint, RejectsMalformedInput) {
  const GaussianPolicy p = random_policy(false);
  std::stringstream ss;
  save_policy(ss, p);
  const std::string good = ss.str();

  auto bad = [](const std::string& text) {
    std::istringstream in(text);
    return load_policy(in);
  };
  EXPECT_THROW(bad(""), std::runtime_error);
  EXPECT_THROW(bad("psurr-checkpoint 2\n"), std::runtime_error);
  EXPECT_THROW(bad(good.substr(0, good.size() / 2)), std::runtime_error);
  std::string kind = good;
  kind.replace(kind.find("kind policy"), 11, "kind value");
  EXPECT_THROW(bad(kind), std::runtime_error);
  EXPECT_THROW(load_policy_file("/nonexistent/policy.ckpt"), std::runtime_error);
}

}  // namespace
}  // namespace psurr
