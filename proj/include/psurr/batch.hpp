#pragma once

#include <vector>

#include "psurr/mlp.hpp"

namespace psurr {

/// Rollout stored as parallel arrays. base_log_probs are recorded under the
/// baseline policy at collection time and define pi_b for every ratio.
struct TransitionBatch {
  std::vector<Vector> states;
  std::vector<Vector> actions;
  std::vector<Vector> next_states;
  std::vector<double> rewards;
  std::vector<char> dones;
  std::vector<char> truncated;
  std::vector<double> base_log_probs;
  std::vector<double> advantages;
  std::vector<double> value_targets;

  std::size_t size() const { return states.size(); }
  /// Throws std::invalid_argument if the core arrays differ in length.
  /// Advantage/target arrays may be empty (not yet computed).
  void validate() const;
};

}  // namespace psurr
