#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "psurr/batch.hpp"
#include "psurr/envs.hpp"
#include "psurr/optimizer.hpp"
#include "psurr/policy.hpp"
#include "psurr/surrogate.hpp"
#include "psurr/value.hpp"

namespace psurr {

struct TrainerConfig {
  EnvSpec env = EnvSpec::make(EnvName::pendulum);
  SurrogateSpec surrogate;
  GaeConfig gae;
  double learning_rate = 3e-4;
  double value_learning_rate = 1e-3;
  int rollout_len = 2048;
  int epochs_per_rollout = 10;
  int minibatch_size = 64;
  long long total_steps = 100000;
  double entropy_gain = 0.01;
  std::uint64_t seed = 0;
  long long eval_every = 0;  // environment steps between evaluations, 0 = off
  int eval_episodes = 50;
  std::vector<int> hidden{64, 64};
  Activation activation = Activation::tanh;
  bool state_dependent_std = false;
  double init_log_std = 0.0;
  bool normalize_advantages = false;
  double grad_clip = 10.0;  // 0 disables
  double max_ratio = kDefaultMaxRatio;
  double td_gain = 0.0;  // reserved; only 0 is accepted

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  PolicyConfig policy_config() const;
};

struct StepMetrics {
  long long step = 0;
  double episode_return = 0.0;
  double surrogate_loss = 0.0;
  double value_loss = 0.0;
  double mean_ratio = 1.0;
  double mean_regularization_amount = 0.0;
  double entropy = 0.0;
  double grad_norm = 0.0;
  long long skipped_updates = 0;
};

struct EvalRecord {
  long long step;
  EvalStats stats;
};

/// Samples rollout_len transitions from the baseline, resetting on episode
/// ends. Returns of episodes finished during collection are appended to
/// `finished_returns` when given.
TransitionBatch collect_rollout(const PolicySnapshot& baseline, Env& env, int rollout_len, Rng& rng,
                                std::vector<double>* finished_returns = nullptr);

struct UpdateOptions {
  double learning_rate = 3e-4;
  int epochs = 10;
  int minibatch_size = 64;
  double entropy_gain = 0.0;
  double grad_clip = 10.0;
  double max_ratio = kDefaultMaxRatio;
};

struct UpdateStats {
  double surrogate_loss = 0.0;
  double mean_ratio = 0.0;
  double mean_regularization_amount = 0.0;
  double entropy = 0.0;
  double grad_norm = 0.0;
  long long updates = 0;
  long long skipped_updates = 0;
  long long clamped_ratios = 0;
};

/// Minibatch gradient of the surrogate loss. The per-sample contribution is
/// -rho * A~ * grad ln pi - entropy_gain * grad H, averaged over the batch
/// indices. Returns the summed per-sample statistics.
struct SurrogateGradient {
  Vector grad;
  double loss = 0.0;
  double ratio = 0.0;
  double regularization_amount = 0.0;
  double entropy = 0.0;
  long long clamped = 0;
};

SurrogateGradient surrogate_gradient(const GaussianPolicy& policy, const TransitionBatch& batch,
                                     std::span<const std::size_t> indices, const SurrogateSpec& spec,
                                     double entropy_gain, double max_ratio);

/// epochs x shuffled minibatches of surrogate descent on `policy`.
UpdateStats policy_update(GaussianPolicy& policy, const TransitionBatch& batch, const SurrogateSpec& spec,
                          AdamState& optimizer, const UpdateOptions& opts, Rng& rng);

struct ValueUpdateStats {
  double loss = 0.0;
  long long updates = 0;
};

/// Regression of V onto batch.value_targets; the target network is
/// Polyak-averaged after every step.
ValueUpdateStats value_update(ValueParams& vparams, ValueParams& target, const TransitionBatch& batch,
                              AdamState& optimizer, double lr, int epochs, int minibatch_size,
                              double polyak_tau, Rng& rng);

struct TrainResult {
  GaussianPolicy policy;
  ValueParams value;
  ValueParams target_value;
  std::vector<StepMetrics> metrics;
  std::vector<EvalRecord> evals;
};

using MetricsCallback = std::function<void(const StepMetrics&)>;

/// Full training loop; one metrics row per rollout. Deterministic in
/// (config, seed).
TrainResult train(const TrainerConfig& config, const MetricsCallback& on_metrics = {});

}  // namespace psurr
