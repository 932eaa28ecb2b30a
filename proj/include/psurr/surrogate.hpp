#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "psurr/ratio_math.hpp"

namespace psurr {

// `vanilla` is the unregularized importance-sampled objective, used as an
// ablation reference.
enum class Variant { ppo_clip, ppo_rb, ppo_rpe, vanilla };

std::string_view to_string(Variant v);
/// Throws std::invalid_argument on unknown names.
Variant parse_variant(std::string_view name);

struct SurrogateSpec {
  Variant variant = Variant::ppo_rpe;
  double epsilon = 0.1;
  double eta = 0.0;   // rollback gain, ppo_rb only
  double beta = 0.5;  // mixture ratio, ppo_rpe only
};

/// Throws std::invalid_argument describing the first offending field.
void validate(const SurrogateSpec& spec);

struct SurrogateEval {
  double loss_term = 0.0;
  double dloss_drho = 0.0;
  double effective_advantage = 0.0;
  double regularization_amount = 0.0;
};

/// Clipped (eta == 0) or rolled-back surrogate ratio.
double ppo_surrogate_ratio(double rho, Sign sigma, double epsilon, double eta);

SurrogateEval evaluate_ppo(double rho, double advantage, const SurrogateSpec& spec);

/// C * (rho_beta - 1)^2 / rho_beta.
double rpe_omega(double rho, double beta, double gain);

SurrogateEval evaluate_rpe(double rho, double advantage, const SurrogateSpec& spec);

SurrogateEval evaluate_vanilla(double rho, double advantage);

/// Dispatches on spec.variant. Validates the spec first.
SurrogateEval evaluate(double rho, double advantage, const SurrogateSpec& spec);

struct CurvePoint {
  double rho;
  double neg_loss;
  double dloss_drho;
};

/// Loss profile of a unit advantage with the given sign over a ratio grid.
std::vector<CurvePoint> loss_curve(const SurrogateSpec& spec, Sign advantage_sign,
                                   std::span<const double> rho_grid);

}  // namespace psurr
