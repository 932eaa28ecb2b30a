#pragma once

#include "psurr/mlp.hpp"

namespace psurr {

/// Bias-corrected first/second moment state (Adam-style).
struct AdamState {
  Vector m;
  Vector v;
  long long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_size(Eigen::Index n);
};

/// params <- params - lr * m_hat / (sqrt(v_hat) + eps). Throws
/// std::invalid_argument on a non-finite gradient; state is left untouched.
void adaptive_sgd_step(AdamState& state, Vector& params, const Vector& gradient, double lr);

}  // namespace psurr
