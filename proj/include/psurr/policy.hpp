#pragma once

#include <vector>

#include "psurr/mlp.hpp"

namespace psurr {

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

struct PolicyConfig {
  int state_dim = 1;
  int action_dim = 1;
  std::vector<int> hidden{64, 64};
  Activation activation = Activation::tanh;
  /// When set, the network emits [mean, log_std]; otherwise log_std is a
  /// free parameter vector.
  bool state_dependent_std = false;
  double init_log_std = 0.0;
};

/// Pre-squash diagonal Gaussian. Actions are tanh(mean + std * z).
struct GaussianHead {
  Vector mean;
  Vector log_std;  // already clamped to [kLogStdMin, kLogStdMax]
};

/// Gaussian policy with tanh squashing. Parameters are the network values
/// followed by the free log_std vector (empty when state dependent).
class GaussianPolicy {
 public:
  GaussianPolicy() = default;
  GaussianPolicy(PolicyConfig config, MlpParams net, Vector log_std);

  /// Small random init; the mean head starts near zero.
  static GaussianPolicy init(const PolicyConfig& config, Rng& rng);
  static GaussianPolicy zeros(const PolicyConfig& config);

  const PolicyConfig& config() const { return config_; }
  const MlpParams& net() const { return net_; }
  const Vector& free_log_std() const { return log_std_; }

  std::size_t param_count() const;
  Vector flat_params() const;
  void set_flat_params(const Vector& theta);

 private:
  PolicyConfig config_;
  MlpParams net_;
  Vector log_std_;
};

GaussianHead forward(const GaussianPolicy& policy, const Vector& state);

struct ActionSample {
  Vector action;
  double log_prob;
};

/// Draws a squashed action. Components are kept strictly inside (-1, 1) so the
/// returned log-density is always evaluable by log_prob().
ActionSample sample(const GaussianHead& head, Rng& rng);

/// Density of a squashed action, including the tanh change of variables.
/// Throws std::domain_error for components outside (-1, 1).
double log_prob(const GaussianHead& head, const Vector& action);

/// Pre-squash Gaussian entropy.
double entropy_bonus(const GaussianHead& head);

/// Gradient of ln pi(action | state) over the flat parameter vector.
Vector grad_log_prob(const GaussianPolicy& policy, const Vector& state, const Vector& action);

struct PolicyTerms {
  double log_prob;
  double entropy;
};

/// Forward state kept for a later backward pass.
struct PolicyPass {
  MlpCache cache;
  GaussianHead head;
  Vector raw_log_std;  // before clamping
  Vector z;            // standardized pre-squash action
  PolicyTerms terms;
};

PolicyPass policy_forward(const GaussianPolicy& policy, const Vector& state, const Vector& action);

/// Accumulates logp_coef * grad(ln pi) + entropy_coef * grad(entropy).
void policy_backward(const GaussianPolicy& policy, const PolicyPass& pass, double logp_coef,
                     double entropy_coef, Eigen::Ref<Vector> grad);

/// One forward/backward pass accumulating
/// logp_coef * grad(ln pi) + entropy_coef * grad(entropy) into `grad`.
PolicyTerms accumulate_policy_grad(const GaussianPolicy& policy, const Vector& state,
                                   const Vector& action, double logp_coef, double entropy_coef,
                                   Eigen::Ref<Vector> grad);

/// Frozen baseline policy.
class PolicySnapshot {
 public:
  explicit PolicySnapshot(GaussianPolicy policy) : policy_(std::move(policy)) {}
  const GaussianPolicy& policy() const { return policy_; }
  double log_prob(const Vector& state, const Vector& action) const;

 private:
  GaussianPolicy policy_;
};

PolicySnapshot snapshot(const GaussianPolicy& policy);
void update_baseline(PolicySnapshot& baseline, const GaussianPolicy& policy);

}  // namespace psurr
