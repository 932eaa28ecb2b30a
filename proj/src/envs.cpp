#include "psurr/envs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "psurr/csv.hpp"

namespace psurr {

namespace {

constexpr double kPi = std::numbers::pi;

// Cart-pole constants (classic control formulation).
constexpr double kCartGravity = 9.8;
constexpr double kCartMass = 1.0;
constexpr double kPoleMass = 0.1;
constexpr double kPoleHalfLength = 0.5;
constexpr double kForceMag = 10.0;
constexpr double kThetaLimit = 12.0 * 2.0 * kPi / 360.0;
constexpr double kXLimit = 2.4;

constexpr double kBanditMeans[2] = {1.0, 0.0};

}  // namespace

std::string_view to_string(EnvName n) {
  switch (n) {
    case EnvName::pendulum: return "pendulum";
    case EnvName::cartpole_continuous: return "cartpole_continuous";
    case EnvName::bandit2: return "bandit2";
  }
  throw std::invalid_argument("unknown environment");
}

EnvName parse_env_name(std::string_view name) {
  if (name == "pendulum") return EnvName::pendulum;
  if (name == "cartpole_continuous" || name == "cartpole") return EnvName::cartpole_continuous;
  if (name == "bandit2") return EnvName::bandit2;
  throw std::invalid_argument("unknown environment '" + std::string(name) + "'");
}

EnvSpec EnvSpec::make(EnvName name) {
  switch (name) {
    case EnvName::pendulum: return {EnvName::pendulum, 3, 1, 200, 0.05, 0.0};
    case EnvName::cartpole_continuous: return {EnvName::cartpole_continuous, 4, 1, 500, 0.02, 0.0};
    case EnvName::bandit2: return {EnvName::bandit2, 1, 1, 1, 0.0, 0.1};
  }
  throw std::invalid_argument("unknown environment");
}

double wrap_angle(double theta) {
  double w = std::fmod(theta + kPi, 2.0 * kPi);
  if (w <= 0.0) w += 2.0 * kPi;
  return w - kPi;
}

PendulumState pendulum_step(PendulumState s, double torque, double dt) {
  // unit mass and length
  const double accel = 1.5 * kPendulumGravity * std::sin(s.theta) + 3.0 * torque;
  PendulumState next;
  next.theta_dot = std::clamp(s.theta_dot + accel * dt, -kPendulumMaxSpeed, kPendulumMaxSpeed);
  next.theta = s.theta + next.theta_dot * dt;
  return next;
}

double pendulum_reward(PendulumState s, double torque) {
  const double th = wrap_angle(s.theta);
  return -(th * th + 0.1 * s.theta_dot * s.theta_dot + 0.001 * torque * torque);
}

double pendulum_energy(PendulumState s) {
  // I = 1/3, centre of mass at 1/2
  return s.theta_dot * s.theta_dot / 6.0 + 0.5 * kPendulumGravity * std::cos(s.theta);
}

CartpoleState cartpole_step(CartpoleState s, double force, double dt) {
  const double total_mass = kCartMass + kPoleMass;
  const double pm_length = kPoleMass * kPoleHalfLength;
  const double cos_t = std::cos(s.theta);
  const double sin_t = std::sin(s.theta);
  const double temp = (force + pm_length * s.theta_dot * s.theta_dot * sin_t) / total_mass;
  const double theta_acc = (kCartGravity * sin_t - cos_t * temp) /
                           (kPoleHalfLength * (4.0 / 3.0 - kPoleMass * cos_t * cos_t / total_mass));
  const double x_acc = temp - pm_length * theta_acc * cos_t / total_mass;
  return {s.x + dt * s.x_dot, s.x_dot + dt * x_acc, s.theta + dt * s.theta_dot,
          s.theta_dot + dt * theta_acc};
}

Env::Env(EnvSpec spec, std::uint64_t seed) : spec_(spec), rng_(seed) {
  if (spec_.max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
  reset();
}

Vector Env::reset(std::uint64_t seed) {
  rng_.seed(seed);
  return reset();
}

Vector Env::reset() {
  t_ = 0;
  episode_return_ = 0.0;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  switch (spec_.name) {
    case EnvName::pendulum: {
      const double th = kPi + 0.1 * u(rng_);
      pendulum_ = {th, 0.05 * u(rng_)};
      break;
    }
    case EnvName::cartpole_continuous:
      cartpole_ = {0.05 * u(rng_), 0.05 * u(rng_), 0.05 * u(rng_), 0.05 * u(rng_)};
      break;
    case EnvName::bandit2: break;
  }
  return observation();
}

Vector Env::observation() const {
  switch (spec_.name) {
    case EnvName::pendulum:
      return Vector{{std::cos(pendulum_.theta), std::sin(pendulum_.theta), pendulum_.theta_dot}};
    case EnvName::cartpole_continuous:
      return Vector{{cartpole_.x, cartpole_.x_dot, cartpole_.theta, cartpole_.theta_dot}};
    case EnvName::bandit2: return Vector::Zero(1);
  }
  throw std::logic_error("unreachable");
}

Transition Env::step(const Vector& action) {
  if (action.size() != spec_.action_dim) throw std::invalid_argument("step: action dimension mismatch");
  if (!action.allFinite()) throw std::invalid_argument("step: non-finite action");
  Transition tr;
  tr.state = observation();
  tr.action = action;
  const double a = std::clamp(action[0], -1.0, 1.0);

  switch (spec_.name) {
    case EnvName::pendulum: {
      const double torque = kPendulumMaxTorque * a;
      tr.reward = pendulum_reward(pendulum_, torque);
      pendulum_ = pendulum_step(pendulum_, torque, spec_.dt);
      break;
    }
    case EnvName::cartpole_continuous: {
      cartpole_ = cartpole_step(cartpole_, kForceMag * a, spec_.dt);
      tr.done = std::abs(cartpole_.x) > kXLimit || std::abs(cartpole_.theta) > kThetaLimit;
      tr.reward = 1.0;
      break;
    }
    case EnvName::bandit2: {
      const int arm = a > 0.0 ? 0 : 1;
      tr.reward = kBanditMeans[arm];
      if (spec_.reward_noise > 0.0) {
        tr.reward += std::normal_distribution<double>(0.0, spec_.reward_noise)(rng_);
      }
      tr.done = true;
      break;
    }
  }
  ++t_;
  episode_return_ += tr.reward;
  tr.next_state = observation();
  tr.truncated = !tr.done && t_ >= spec_.max_steps;
  return tr;
}

EvalStats summarize_returns(std::vector<double> returns) {
  if (returns.empty()) throw std::invalid_argument("summarize_returns: no episodes");
  EvalStats st;
  st.returns = std::move(returns);
  const std::size_t n = st.returns.size();
  std::vector<double> sorted = st.returns;
  std::sort(sorted.begin(), sorted.end());
  st.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  double sum = 0.0;
  for (double r : st.returns) sum += r;
  st.mean = sum / static_cast<double>(n);
  double var = 0.0;
  for (double r : st.returns) var += (r - st.mean) * (r - st.mean);
  const double se = n > 1 ? std::sqrt(var / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  st.ci_low = st.mean - 1.96 * se;
  st.ci_high = st.mean + 1.96 * se;
  return st;
}

std::vector<Transition> run_episode(const EnvSpec& spec, const GaussianPolicy& policy,
                                    std::uint64_t seed, bool deterministic) {
  Env env(spec, seed);
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<Transition> trace;
  Vector obs = env.observation();
  for (;;) {
    const GaussianHead head = forward(policy, obs);
    const Vector action = deterministic ? Vector(head.mean.array().tanh()) : sample(head, rng).action;
    trace.push_back(env.step(action));
    if (trace.back().done || trace.back().truncated) break;
    obs = trace.back().next_state;
  }
  return trace;
}

EvalStats evaluate_policy(const EnvSpec& spec, const GaussianPolicy& policy, int episodes,
                          std::uint64_t seed, bool deterministic) {
  if (episodes <= 0) throw std::invalid_argument("evaluate_policy: episodes must be positive");
  std::vector<double> returns;
  returns.reserve(static_cast<std::size_t>(episodes));
  for (int k = 0; k < episodes; ++k) {
    double ret = 0.0;
    for (const Transition& tr : run_episode(spec, policy, seed + static_cast<std::uint64_t>(k), deterministic)) {
      ret += tr.reward;
    }
    returns.push_back(ret);
  }
  return summarize_returns(std::move(returns));
}

void write_trace_csv(std::ostream& out, const std::vector<Transition>& trace) {
  CsvWriter csv(out);
  std::vector<std::string> header{"t"};
  if (!trace.empty()) {
    for (Eigen::Index i = 0; i < trace.front().state.size(); ++i) header.push_back("s" + std::to_string(i));
    for (Eigen::Index i = 0; i < trace.front().action.size(); ++i) header.push_back("a" + std::to_string(i));
  }
  header.push_back("reward");
  header.push_back("done");
  csv.header(header);
  for (std::size_t t = 0; t < trace.size(); ++t) {
    const Transition& tr = trace[t];
    csv.field(static_cast<long long>(t));
    for (double v : tr.state) csv.field(v);
    for (double v : tr.action) csv.field(v);
    csv.field(tr.reward);
    csv.field(static_cast<long long>(tr.done || tr.truncated ? 1 : 0));
    csv.end_row();
  }
}

}  // namespace psurr
