#pragma once

#include <iosfwd>
#include <string>

#include "psurr/policy.hpp"
#include "psurr/value.hpp"

namespace psurr {

// Plain-text checkpoint, version 1:
//
//   psurr-checkpoint 1
//   kind policy|value
//   activation tanh|swish
//   layer_sizes <count> <size>...
//   state_dependent_std 0|1        (policy only)
//   log_std <count>                (policy only)
//   values <count>
//   <one value per line, shortest round-trip decimal>
//
// Values are the flat network parameters (per layer: row-major weight, then
// bias) followed, for policies, by the free log_std vector.

void save_policy(std::ostream& out, const GaussianPolicy& policy);
GaussianPolicy load_policy(std::istream& in);
void save_value(std::ostream& out, const ValueParams& value);
ValueParams load_value(std::istream& in);

/// File variants. Throw std::runtime_error on I/O or format problems.
void save_policy_file(const std::string& path, const GaussianPolicy& policy);
GaussianPolicy load_policy_file(const std::string& path);
void save_value_file(const std::string& path, const ValueParams& value);
ValueParams load_value_file(const std::string& path);

}  // namespace psurr
