#include "psurr/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace psurr {

AdamState AdamState::for_size(Eigen::Index n) {
  AdamState s;
  s.m = Vector::Zero(n);
  s.v = Vector::Zero(n);
  return s;
}

void adaptive_sgd_step(AdamState& state, Vector& params, const Vector& gradient, double lr) {
  if (gradient.size() != params.size()) throw std::invalid_argument("adaptive_sgd_step: size mismatch");
  if (!gradient.allFinite()) throw std::invalid_argument("adaptive_sgd_step: non-finite gradient");
  if (state.m.size() != params.size()) {
    state.m = Vector::Zero(params.size());
    state.v = Vector::Zero(params.size());
    state.t = 0;
  }
  ++state.t;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * gradient;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * gradient.cwiseProduct(gradient);
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  params.array() -= lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + state.eps);
}

}  // namespace psurr
