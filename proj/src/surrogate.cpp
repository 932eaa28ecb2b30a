#include "psurr/surrogate.hpp"

#include <cmath>
#include <stdexcept>

namespace psurr {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::ppo_clip: return "ppo_clip";
    case Variant::ppo_rb: return "ppo_rb";
    case Variant::ppo_rpe: return "ppo_rpe";
    case Variant::vanilla: return "vanilla";
  }
  throw std::invalid_argument("unknown surrogate variant");
}

Variant parse_variant(std::string_view name) {
  if (name == "ppo_clip" || name == "ppo") return Variant::ppo_clip;
  if (name == "ppo_rb") return Variant::ppo_rb;
  if (name == "ppo_rpe") return Variant::ppo_rpe;
  if (name == "vanilla") return Variant::vanilla;
  throw std::invalid_argument("unknown surrogate variant '" + std::string(name) + "'");
}

void validate(const SurrogateSpec& spec) {
  if (!(spec.epsilon > 0.0 && spec.epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1)");
  }
  if (!(spec.eta >= 0.0) || !std::isfinite(spec.eta)) {
    throw std::invalid_argument("eta must be finite and >= 0");
  }
  if (spec.eta > 0.0 && spec.variant != Variant::ppo_rb) {
    throw std::invalid_argument("eta > 0 is only valid for variant ppo_rb");
  }
  if (!(spec.beta >= 0.0 && spec.beta < 1.0)) {
    throw std::invalid_argument("beta must lie in [0, 1)");
  }
  if (spec.variant == Variant::ppo_rpe && !(1.0 - spec.beta * (1.0 + spec.epsilon) > 0.0)) {
    throw std::invalid_argument("beta*(1 + epsilon) must be < 1 so both thresholds exist");
  }
}

double ppo_surrogate_ratio(double rho, Sign sigma, double epsilon, double eta) {
  if (!(rho > 0.0)) throw std::invalid_argument("ppo_surrogate_ratio: rho must be > 0");
  const double s = to_double(sigma);
  if (s * (rho - 1.0) >= epsilon) {
    return -eta * rho + (1.0 + eta) * (1.0 + s * epsilon);
  }
  return rho;
}

SurrogateEval evaluate_ppo(double rho, double advantage, const SurrogateSpec& spec) {
  if (spec.variant != Variant::ppo_clip && spec.variant != Variant::ppo_rb) {
    throw std::invalid_argument("evaluate_ppo: variant must be ppo_clip or ppo_rb");
  }
  if (!(rho > 0.0)) throw std::invalid_argument("evaluate_ppo: rho must be > 0");
  if (advantage == 0.0) return {};

  const Sign sigma = sign_of(advantage);
  const double s = to_double(sigma);
  const double surrogate = ppo_surrogate_ratio(rho, sigma, spec.epsilon, spec.eta);
  // Kink itself takes the interior slope.
  const double slope = s * (rho - 1.0) > spec.epsilon ? -spec.eta : 1.0;

  SurrogateEval out;
  out.loss_term = -surrogate * advantage;
  out.dloss_drho = -advantage * slope;
  out.effective_advantage = -out.dloss_drho;
  out.regularization_amount = s * (rho - surrogate);
  return out;
}

double rpe_omega(double rho, double beta, double gain) {
  if (!(rho > 0.0)) throw std::invalid_argument("rpe_omega: rho must be > 0");
  const double rb = relative_ratio(rho, beta);
  const double d = rb - 1.0;
  return gain * d * d / rb;
}

SurrogateEval evaluate_rpe(double rho, double advantage, const SurrogateSpec& spec) {
  if (spec.variant != Variant::ppo_rpe) {
    throw std::invalid_argument("evaluate_rpe: variant must be ppo_rpe");
  }
  if (!(rho > 0.0)) throw std::invalid_argument("evaluate_rpe: rho must be > 0");
  if (advantage == 0.0) return {};

  const double beta = spec.beta;
  const Sign sigma = sign_of(advantage);
  // Checks the threshold precondition.
  (void)ratio_thresholds(spec.epsilon, beta, sigma);
  const double gain = regularization_gain(advantage, spec.epsilon, beta, sigma);

  const double mix = 1.0 + beta * (rho - 1.0);  // pi_beta / pi_b
  const double d = relative_ratio(rho, beta) - 1.0;
  // rho * Omega, the regularizer as it appears under baseline sampling.
  const double penalty = gain * mix * d * d;

  SurrogateEval out;
  out.loss_term = -(rho * advantage - penalty);
  out.effective_advantage = advantage - gain * d * (beta * d + 2.0 * (1.0 - beta) / mix);
  out.dloss_drho = -out.effective_advantage;
  // rho_dagger = (rho*A - penalty) / A
  out.regularization_amount = to_double(sigma) * penalty / advantage;
  return out;
}

SurrogateEval evaluate_vanilla(double rho, double advantage) {
  if (!(rho > 0.0)) throw std::invalid_argument("evaluate_vanilla: rho must be > 0");
  SurrogateEval out;
  out.loss_term = -rho * advantage;
  out.dloss_drho = -advantage;
  out.effective_advantage = advantage;
  return out;
}

SurrogateEval evaluate(double rho, double advantage, const SurrogateSpec& spec) {
  validate(spec);
  switch (spec.variant) {
    case Variant::ppo_clip:
    case Variant::ppo_rb: return evaluate_ppo(rho, advantage, spec);
    case Variant::ppo_rpe: return evaluate_rpe(rho, advantage, spec);
    case Variant::vanilla: return evaluate_vanilla(rho, advantage);
  }
  throw std::invalid_argument("evaluate: unknown variant");
}

std::vector<CurvePoint> loss_curve(const SurrogateSpec& spec, Sign advantage_sign,
                                   std::span<const double> rho_grid) {
  if (rho_grid.empty()) throw std::invalid_argument("loss_curve: empty grid");
  const double advantage = to_double(advantage_sign);
  std::vector<CurvePoint> rows;
  rows.reserve(rho_grid.size());
  for (double rho : rho_grid) {
    if (!(rho > 0.0) || !std::isfinite(rho)) {
      throw std::invalid_argument("loss_curve: grid entries must be positive and finite");
    }
    const SurrogateEval e = evaluate(rho, advantage, spec);
    rows.push_back({rho, -e.loss_term, e.dloss_drho});
  }
  return rows;
}

}  // namespace psurr
