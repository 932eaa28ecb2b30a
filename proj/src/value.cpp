#include "psurr/value.hpp"

#include <cmath>
#include <stdexcept>

namespace psurr {

void TransitionBatch::validate() const {
  const std::size_t n = states.size();
  if (actions.size() != n || next_states.size() != n || rewards.size() != n || dones.size() != n ||
      truncated.size() != n || base_log_probs.size() != n) {
    throw std::invalid_argument("TransitionBatch: array lengths differ");
  }
  if (!advantages.empty() && advantages.size() != n) {
    throw std::invalid_argument("TransitionBatch: advantages length mismatch");
  }
  if (!value_targets.empty() && value_targets.size() != n) {
    throw std::invalid_argument("TransitionBatch: value_targets length mismatch");
  }
}

void GaeConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
  if (!(polyak_tau > 0.0 && polyak_tau <= 1.0)) throw std::invalid_argument("polyak_tau must lie in (0, 1]");
}

ValueParams make_value_params(int state_dim, const std::vector<int>& hidden, Activation act, Rng& rng) {
  std::vector<int> sizes{state_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  return MlpParams::random(std::move(sizes), act, rng);
}

double value_of(const ValueParams& params, const Vector& state) {
  return mlp_forward(params, state)[0];
}

std::vector<double> advantage_estimates(const TransitionBatch& rollout, const ValueParams& vparams,
                                        const ValueParams& target_vparams, const GaeConfig& cfg) {
  rollout.validate();
  if (rollout.size() == 0) throw std::invalid_argument("advantage_estimates: empty rollout");
  if (vparams.output_dim() != 1 || target_vparams.output_dim() != 1) {
    throw std::invalid_argument("advantage_estimates: value networks must have scalar output");
  }
  cfg.validate();
  const std::size_t n = rollout.size();
  std::vector<double> adv(n);
  double next_adv = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const bool done = rollout.dones[i] != 0;
    const bool boundary = done || rollout.truncated[i] != 0;
    const double bootstrap = done ? 0.0 : cfg.gamma * value_of(target_vparams, rollout.next_states[i]);
    const double delta = rollout.rewards[i] + bootstrap - value_of(vparams, rollout.states[i]);
    const double carry = boundary || i + 1 == n ? 0.0 : cfg.gamma * cfg.lambda * next_adv;
    adv[i] = delta + carry;
    next_adv = adv[i];
  }
  return adv;
}

ValueLossGrad value_loss_grad(const ValueParams& vparams, std::span<const Vector> states,
                              std::span<const double> targets) {
  if (states.size() != targets.size()) throw std::invalid_argument("value_loss_grad: length mismatch");
  if (states.empty()) throw std::invalid_argument("value_loss_grad: empty batch");
  ValueLossGrad out{0.0, Vector::Zero(vparams.values.size())};
  const double inv_n = 1.0 / static_cast<double>(states.size());
  MlpCache cache;
  Vector g(1);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double err = mlp_forward(vparams, states[i], &cache)[0] - targets[i];
    out.loss += 0.5 * err * err * inv_n;
    g[0] = err * inv_n;
    mlp_backward(vparams, cache, g, out.grad);
  }
  return out;
}

void soft_update(ValueParams& target, const ValueParams& online, double tau) {
  if (target.layer_sizes != online.layer_sizes) throw std::invalid_argument("soft_update: shape mismatch");
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("soft_update: tau must lie in [0, 1]");
  if (tau == 1.0) {
    target.values = online.values;
    return;
  }
  target.values = (1.0 - tau) * target.values + tau * online.values;
}

void normalize_advantages(std::span<double> advantages) {
  if (advantages.empty()) return;
  double mean = 0.0;
  for (double a : advantages) mean += a;
  mean /= static_cast<double>(advantages.size());
  double var = 0.0;
  for (double a : advantages) var += (a - mean) * (a - mean);
  const double std = std::sqrt(var / static_cast<double>(advantages.size()));
  const double scale = std > 1e-12 ? 1.0 / std : 1.0;
  for (double& a : advantages) a = (a - mean) * scale;
}

}  // namespace psurr
