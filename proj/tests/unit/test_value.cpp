#include <cmath>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "psurr/value.hpp"

namespace psurr {
namespace {

/// Value net that returns a constant c: zero weights, output bias c.
ValueParams constant_value(int state_dim, double c) {
  ValueParams v = MlpParams::zeros({state_dim, 4, 1}, Activation::tanh);
  v.bias(1)[0] = c;
  return v;
}

TransitionBatch make_batch(const std::vector<double>& rewards, const std::vector<char>& dones,
                           const std::vector<char>& truncated, int state_dim = 1) {
  TransitionBatch b;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    b.states.push_back(Vector::Constant(state_dim, static_cast<double>(i)));
    b.next_states.push_back(Vector::Constant(state_dim, static_cast<double>(i + 1)));
    b.actions.push_back(Vector::Zero(1));
    b.rewards.push_back(rewards[i]);
    b.dones.push_back(dones[i]);
    b.truncated.push_back(truncated[i]);
    b.base_log_probs.push_back(0.0);
  }
  return b;
}

TEST(Gae, SingleTerminalStep) {
  const auto b = make_batch({1.0}, {1}, {0});
  const auto v = constant_value(1, 0.0);
  const auto adv = advantage_estimates(b, v, v, {0.99, 0.95, 0.1});
  ASSERT_EQ(adv.size(), 1u);
  EXPECT_DOUBLE_EQ(adv[0], 1.0);
}

TEST(Gae, LambdaZeroTwoSteps) {
  const auto b = make_batch({0.5, -1.0}, {0, 1}, {0, 0});
  const auto v = constant_value(1, 2.0);
  const auto target = constant_value(1, 3.0);
  const auto adv = advantage_estimates(b, v, target, {0.9, 0.0, 0.1});
  // delta0 = 0.5 + 0.9*3 - 2, delta1 = -1 + 0 - 2
  EXPECT_DOUBLE_EQ(adv[0], 0.5 + 0.9 * 3.0 - 2.0);
  EXPECT_DOUBLE_EQ(adv[1], -1.0 - 2.0);
}

TEST(Gae, LambdaZeroIsOneStepTdOnRandomRollouts) {
  Rng rng(21);
  std::normal_distribution<double> n(0.0, 1.0);
  const ValueParams v = make_value_params(2, {8}, Activation::tanh, rng);
  const ValueParams t = make_value_params(2, {8}, Activation::tanh, rng);
  for (int trial = 0; trial < 20; ++trial) {
    TransitionBatch b;
    for (int i = 0; i < 30; ++i) {
      b.states.push_back(Vector{{n(rng), n(rng)}});
      b.next_states.push_back(Vector{{n(rng), n(rng)}});
      b.actions.push_back(Vector::Zero(1));
      b.rewards.push_back(n(rng));
      b.dones.push_back(n(rng) > 1.0);
      b.truncated.push_back(n(rng) > 1.5);
      b.base_log_probs.push_back(0.0);
    }
    const auto adv = advantage_estimates(b, v, t, {0.97, 0.0, 0.1});
    for (std::size_t i = 0; i < b.size(); ++i) {
      const double boot = b.dones[i] ? 0.0 : 0.97 * value_of(t, b.next_states[i]);
      EXPECT_EQ(adv[i], b.rewards[i] + boot - value_of(v, b.states[i]));
    }
  }
}

TEST(Gae, LambdaOneIsDiscountedReturnMinusValue) {
  Rng rng(4);
  const ValueParams v = make_value_params(1, {6}, Activation::tanh, rng);
  const std::vector<double> r{0.3, -0.2, 1.0, 0.7, 0.1};
  const auto b = make_batch(r, {0, 0, 0, 0, 1}, {0, 0, 0, 0, 0});
  const double gamma = 0.9;
  const auto adv = advantage_estimates(b, v, v, {gamma, 1.0, 0.1});
  for (std::size_t t = 0; t < r.size(); ++t) {
    double ret = 0.0, disc = 1.0;
    for (std::size_t k = t; k < r.size(); ++k, disc *= gamma) ret += disc * r[k];
    EXPECT_NEAR(adv[t], ret - value_of(v, b.states[t]), 1e-12);
  }
}

TEST(Gae, TruncationCutsTraceButBootstraps) {
  const auto b = make_batch({1.0, 1.0}, {0, 0}, {1, 0});
  const auto v = constant_value(1, 0.5);
  const auto adv = advantage_estimates(b, v, v, {0.9, 1.0, 0.1});
  EXPECT_DOUBLE_EQ(adv[0], 1.0 + 0.9 * 0.5 - 0.5);
}

TEST(Gae, Errors) {
  auto b = make_batch({1.0, 2.0}, {0, 1}, {0, 0});
  const auto v = constant_value(1, 0.0);
  b.rewards.pop_back();
  EXPECT_THROW(advantage_estimates(b, v, v, {}), std::invalid_argument);
  EXPECT_THROW(advantage_estimates(TransitionBatch{}, v, v, {}), std::invalid_argument);
  const auto ok = make_batch({1.0}, {1}, {0});
  EXPECT_THROW(advantage_estimates(ok, v, v, {1.0, 0.5, 0.1}), std::invalid_argument);
}

TEST(ValueLoss, ZeroErrorGivesZeroGradient) {
  const auto v = constant_value(2, 1.5);
  const std::vector<Vector> s{Vector{{0.1, 0.2}}, Vector{{-1.0, 3.0}}};
  const std::vector<double> y{1.5, 1.5};
  const auto lg = value_loss_grad(v, s, y);
  EXPECT_EQ(lg.loss, 0.0);
  EXPECT_TRUE(lg.grad.isZero());
}

TEST(ValueLoss, ConstantNetIsVarianceTerm) {
  const auto v = constant_value(1, 1.0);
  const std::vector<Vector> s(4, Vector::Zero(1));
  const std::vector<double> y{0.0, 1.0, 2.0, 3.0};
  // 0.5 * mean((1 - y)^2) = 0.5 * (1 + 0 + 1 + 4) / 4
  EXPECT_DOUBLE_EQ(value_loss_grad(v, s, y).loss, 0.75);
}

TEST(ValueLoss, GradientMatchesFiniteDifferences) {
  Rng rng(8);
  ValueParams v = make_value_params(3, {7, 5}, Activation::swish, rng);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<Vector> s;
  std::vector<double> y;
  for (int i = 0; i < 6; ++i) {
    s.push_back(Vector{{n(rng), n(rng), n(rng)}});
    y.push_back(n(rng));
  }
  const auto lg = value_loss_grad(v, s, y);
  for (Eigen::Index i = 0; i < v.values.size(); ++i) {
    const double orig = v.values[i];
    v.values[i] = orig + 1e-6;
    const double up = value_loss_grad(v, s, y).loss;
    v.values[i] = orig - 1e-6;
    const double down = value_loss_grad(v, s, y).loss;
    v.values[i] = orig;
    const double fd = (up - down) / 2e-6;
    EXPECT_LT(std::abs(lg.grad[i] - fd) / std::max({std::abs(fd), std::abs(lg.grad[i]), 1e-6}), 1e-4);
  }
}

TEST(SoftUpdate, EndpointsAndMidpoint) {
  ValueParams target = constant_value(1, 0.0);
  const ValueParams online = constant_value(1, 4.0);
  ValueParams t0 = target;
  soft_update(t0, online, 0.0);
  EXPECT_EQ(t0.values, target.values);
  ValueParams t1 = target;
  soft_update(t1, online, 1.0);
  EXPECT_EQ(t1.values, online.values);
  ValueParams half = target;
  soft_update(half, online, 0.5);
  EXPECT_DOUBLE_EQ(half.bias(1)[0], 2.0);
  EXPECT_THROW(soft_update(half, MlpParams::zeros({2, 1}, Activation::tanh), 0.5), std::invalid_argument);
}

TEST(SoftUpdate, ContractsTowardOnline) {
  Rng rng(12);
  ValueParams target = make_value_params(2, {5}, Activation::tanh, rng);
  const ValueParams online = make_value_params(2, {5}, Activation::tanh, rng);
  double prev = (target.values - online.values).norm();
  for (int i = 0; i < 50; ++i) {
    soft_update(target, online, 0.1);
    const double d = (target.values - online.values).norm();
    EXPECT_LT(d, prev);
    prev = d;
  }
}

TEST(NormalizeAdvantages, ZeroMeanUnitStd) {
  std::vector<double> a{3.0, -1.0, 0.5, 8.0, 2.2};
  normalize_advantages(a);
  double mean = 0.0, var = 0.0;
  for (double x : a) mean += x;
  mean /= a.size();
  for (double x : a) var += (x - mean) * (x - mean);
  EXPECT_NEAR(mean, 0.0, 1e-6);
  EXPECT_NEAR(std::sqrt(var / a.size()), 1.0, 1e-6);
}

}  // namespace
}  // namespace psurr
