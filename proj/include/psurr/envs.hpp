#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "psurr/mlp.hpp"
#include "psurr/policy.hpp"

namespace psurr {

enum class EnvName { pendulum, cartpole_continuous, bandit2 };

std::string_view to_string(EnvName n);
EnvName parse_env_name(std::string_view name);

/// Static description of a built-in task. Actions live in [-1, 1]^action_dim
/// and are rescaled inside step().
struct EnvSpec {
  EnvName name = EnvName::pendulum;
  int state_dim = 3;
  int action_dim = 1;
  int max_steps = 200;
  double dt = 0.05;
  double reward_noise = 0.1;  // bandit2 only

  static EnvSpec make(EnvName name);
};

struct Transition {
  Vector state;
  Vector action;
  double reward = 0.0;
  Vector next_state;
  bool done = false;       // terminal: no bootstrap past this step
  bool truncated = false;  // time limit reached: episode ends, bootstrap still valid
};

/// Physical pendulum state; angle 0 is upright.
struct PendulumState {
  double theta;
  double theta_dot;
};

inline constexpr double kPendulumGravity = 10.0;
inline constexpr double kPendulumMaxSpeed = 8.0;
inline constexpr double kPendulumMaxTorque = 2.0;

/// Angle wrapped into (-pi, pi].
double wrap_angle(double theta);
/// Semi-implicit Euler step (velocity first) under torque u.
PendulumState pendulum_step(PendulumState s, double torque, double dt);
double pendulum_reward(PendulumState s, double torque);
/// Mechanical energy of the unit rod, up to a constant.
double pendulum_energy(PendulumState s);

struct CartpoleState {
  double x, x_dot, theta, theta_dot;
};

CartpoleState cartpole_step(CartpoleState s, double force, double dt);

/// Seedable single-threaded environment instance.
class Env {
 public:
  Env(EnvSpec spec, std::uint64_t seed);

  const EnvSpec& spec() const { return spec_; }
  Vector reset();
  Vector reset(std::uint64_t seed);
  Transition step(const Vector& action);
  Vector observation() const;
  int elapsed() const { return t_; }
  /// Sum of rewards since the last reset.
  double episode_return() const { return episode_return_; }

  /// Test hooks for placing the pendulum / cart-pole in a given state.
  void set_pendulum_state(PendulumState s) { pendulum_ = s; t_ = 0; episode_return_ = 0.0; }
  void set_cartpole_state(CartpoleState s) { cartpole_ = s; t_ = 0; episode_return_ = 0.0; }

 private:
  EnvSpec spec_;
  Rng rng_;
  int t_ = 0;
  double episode_return_ = 0.0;
  PendulumState pendulum_{0.0, 0.0};
  CartpoleState cartpole_{0.0, 0.0, 0.0, 0.0};
};

struct EvalStats {
  std::vector<double> returns;
  double median = 0.0;
  double mean = 0.0;
  double ci_low = 0.0;   // mean -/+ 1.96 standard errors
  double ci_high = 0.0;
};

EvalStats summarize_returns(std::vector<double> returns);

/// Runs `episodes` test episodes. Episode k is reset with seed (seed + k).
/// Deterministic mode acts with tanh(mean).
EvalStats evaluate_policy(const EnvSpec& spec, const GaussianPolicy& policy, int episodes,
                          std::uint64_t seed, bool deterministic = true);

/// Records one episode.
std::vector<Transition> run_episode(const EnvSpec& spec, const GaussianPolicy& policy,
                                    std::uint64_t seed, bool deterministic = true);

/// CSV with header `t,state...,action...,reward,done`.
void write_trace_csv(std::ostream& out, const std::vector<Transition>& trace);

}  // namespace psurr
