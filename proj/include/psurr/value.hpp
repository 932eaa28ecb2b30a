#pragma once

#include <span>
#include <vector>

#include "psurr/batch.hpp"
#include "psurr/mlp.hpp"

namespace psurr {

struct GaeConfig {
  double gamma = 0.99;
  double lambda = 0.95;
  double polyak_tau = 0.05;

  void validate() const;
};

/// Scalar-output network approximating V(s).
using ValueParams = MlpParams;

ValueParams make_value_params(int state_dim, const std::vector<int>& hidden, Activation act, Rng& rng);

double value_of(const ValueParams& params, const Vector& state);

/// GAE(gamma, lambda). TD errors bootstrap from the target network,
/// r + gamma*V_target(s')*(1 - done) - V(s); traces are cut at episode ends.
std::vector<double> advantage_estimates(const TransitionBatch& rollout, const ValueParams& vparams,
                                        const ValueParams& target_vparams, const GaeConfig& cfg);

struct ValueLossGrad {
  double loss;
  Vector grad;
};

/// 0.5 * mean squared error against `targets`, with its gradient.
ValueLossGrad value_loss_grad(const ValueParams& vparams, std::span<const Vector> states,
                              std::span<const double> targets);

/// target <- (1 - tau)*target + tau*online
void soft_update(ValueParams& target, const ValueParams& online, double tau);

/// In-place shift/scale to zero mean and unit standard deviation.
void normalize_advantages(std::span<double> advantages);

}  // namespace psurr
