#include <cmath>
#include <algorithm>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

#include "psurr/envs.hpp"

namespace psurr {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Env, ResetIsSeedDeterministic) {
  for (EnvName n : {EnvName::pendulum, EnvName::cartpole_continuous, EnvName::bandit2}) {
    Env a(EnvSpec::make(n), 5), b(EnvSpec::make(n), 5);
    EXPECT_EQ(a.reset(77), b.reset(77));
  }
}

TEST(Env, PendulumResetRanges) {
  Env env(EnvSpec::make(EnvName::pendulum), 1);
  for (int i = 0; i < 200; ++i) {
    const Vector s = env.reset();
    ASSERT_EQ(s.size(), 3);
    EXPECT_NEAR(s[0] * s[0] + s[1] * s[1], 1.0, 1e-14);
    EXPECT_LT(std::abs(wrap_angle(std::atan2(s[1], s[0]) - kPi)), 0.1 + 1e-12);
    EXPECT_LE(std::abs(s[2]), 0.05);
  }
}

TEST(Env, BanditResetIsFixed) {
  Env env(EnvSpec::make(EnvName::bandit2), 1);
  EXPECT_EQ(env.reset(), Vector::Zero(1));
  EXPECT_EQ(env.reset(99), Vector::Zero(1));
}

TEST(Pendulum, UprightEquilibrium) {
  Env env(EnvSpec::make(EnvName::pendulum), 0);
  env.set_pendulum_state({0.0, 0.0});
  const Transition tr = env.step(Vector::Zero(1));
  EXPECT_EQ(tr.reward, 0.0);
  EXPECT_EQ(tr.next_state, (Vector{{1.0, 0.0, 0.0}}));
}

TEST(Pendulum, HangingStepHolds) {
  // accel = 15*sin(pi) ~ 1.8e-15: the state only moves by rounding noise
  const PendulumState next = pendulum_step({kPi, 0.0}, 0.0, 0.05);
  EXPECT_NEAR(next.theta, kPi, 1e-15);
  EXPECT_NEAR(next.theta_dot, 9.184850993605151e-17, 1e-20);
}

TEST(Pendulum, RewardUsesWrappedAngle) {
  EXPECT_NEAR(pendulum_reward({2.0 * kPi + 0.5, 1.0}, 2.0), -(0.25 + 0.1 + 0.004), 1e-12);
  EXPECT_NEAR(wrap_angle(kPi), kPi, 1e-15);
  EXPECT_NEAR(wrap_angle(-kPi), kPi, 1e-15);
  EXPECT_NEAR(wrap_angle(3.0 * kPi / 2.0), -kPi / 2.0, 1e-15);
}

TEST(Pendulum, SpeedClamp) {
  const PendulumState s = pendulum_step({kPi / 2.0, 7.9}, 2.0, 0.05);
  EXPECT_EQ(s.theta_dot, kPendulumMaxSpeed);
}

double max_energy_drift(double dt) {
  PendulumState s{kPi - 0.8, 0.0};
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const PendulumState n = pendulum_step(s, 0.0, dt);
    worst = std::max(worst, std::abs(pendulum_energy(n) - pendulum_energy(s)));
    s = n;
  }
  return worst;
}

TEST(Pendulum, EnergyDriftPerStepIsSecondOrder) {
  const double d1 = max_energy_drift(1e-3);
  const double d2 = max_energy_drift(5e-4);
  EXPECT_LT(d1, 50.0 * 1e-3 * 1e-3);
  EXPECT_GT(d1 / d2, 3.0);
}

TEST(Cartpole, TerminatesWhenFalling) {
  Env env(EnvSpec::make(EnvName::cartpole_continuous), 3);
  env.set_cartpole_state({0.0, 0.0, 0.25, 0.0});
  const Transition tr = env.step(Vector::Zero(1));
  EXPECT_TRUE(tr.done);
  EXPECT_EQ(tr.reward, 1.0);
}

TEST(Cartpole, UprightIsEquilibrium) {
  const CartpoleState s = cartpole_step({0.0, 0.0, 0.0, 0.0}, 0.0, 0.02);
  EXPECT_EQ(s.theta, 0.0);
  EXPECT_EQ(s.x_dot, 0.0);
}

TEST(Bandit, StubbedNoiseRewards) {
  EnvSpec spec = EnvSpec::make(EnvName::bandit2);
  spec.reward_noise = 0.0;
  Env env(spec, 0);
  Transition tr = env.step(Vector::Constant(1, 0.5));
  EXPECT_EQ(tr.reward, 1.0);
  EXPECT_TRUE(tr.done);
  env.reset();
  tr = env.step(Vector::Constant(1, -0.5));
  EXPECT_EQ(tr.reward, 0.0);
}

TEST(Env, HorizonTruncates) {
  Env env(EnvSpec::make(EnvName::pendulum), 2);
  Transition tr;
  int n = 0;
  do {
    tr = env.step(Vector::Constant(1, 0.3));
    ++n;
    ASSERT_TRUE(tr.next_state.allFinite());
  } while (!tr.truncated && !tr.done);
  EXPECT_EQ(n, 200);
  EXPECT_FALSE(tr.done);
}

TEST(Env, TrajectoriesStayFiniteUnderBoundedActions) {
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (EnvName n : {EnvName::pendulum, EnvName::cartpole_continuous}) {
    Env env(EnvSpec::make(n), 9);
    for (int i = 0; i < 2000; ++i) {
      const Transition tr = env.step(Vector::Constant(1, u(rng)));
      ASSERT_TRUE(tr.next_state.allFinite());
      ASSERT_TRUE(std::isfinite(tr.reward));
      if (tr.done || tr.truncated) env.reset();
    }
  }
}

TEST(Env, RejectsBadActions) {
  Env env(EnvSpec::make(EnvName::pendulum), 2);
  EXPECT_THROW(env.step(Vector::Zero(2)), std::invalid_argument);
  EXPECT_THROW(env.step(Vector::Constant(1, NAN)), std::invalid_argument);
}

PolicyConfig pendulum_policy() {
  PolicyConfig c;
  c.state_dim = 3;
  c.action_dim = 1;
  c.hidden = {8};
  return c;
}

TEST(EvaluatePolicy, ZeroPolicyPendulumBand) {
  // Band from an independent zero-torque simulation over a grid of initial
  // conditions theta in pi +- 0.1, theta_dot in +-0.05.
  const auto st = evaluate_policy(EnvSpec::make(EnvName::pendulum), GaussianPolicy::zeros(pendulum_policy()), 50, 0);
  EXPECT_EQ(st.returns.size(), 50u);
  EXPECT_GE(st.median, -1973.9208802178748 - 1.0);
  EXPECT_LE(st.median, -1894.0992301966655 + 1.0);
  EXPECT_LE(st.ci_low, st.mean);
  EXPECT_GE(st.ci_high, st.mean);
}

TEST(EvaluatePolicy, ReproducibleAndValidated) {
  Rng rng(1);
  const GaussianPolicy p = GaussianPolicy::init(pendulum_policy(), rng);
  const auto spec = EnvSpec::make(EnvName::pendulum);
  const auto a = evaluate_policy(spec, p, 5, 3, false);
  const auto b = evaluate_policy(spec, p, 5, 3, false);
  EXPECT_EQ(a.returns, b.returns);
  EXPECT_THROW(evaluate_policy(spec, p, 0, 3), std::invalid_argument);
}

TEST(SummarizeReturns, MedianEvenOdd) {
  EXPECT_EQ(summarize_returns({3.0, 1.0, 2.0}).median, 2.0);
  EXPECT_EQ(summarize_returns({4.0, 1.0, 2.0, 3.0}).median, 2.5);
  EXPECT_THROW(summarize_returns({}), std::invalid_argument);
}

TEST(Trace, CsvLayout) {
  const auto trace = run_episode(EnvSpec::make(EnvName::pendulum), GaussianPolicy::zeros(pendulum_policy()), 4);
  std::ostringstream out;
  write_trace_csv(out, trace);
  const std::string csv = out.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,s0,s1,s2,a0,reward,done");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 201);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
}

}  // namespace
}  // namespace psurr
