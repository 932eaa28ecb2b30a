#include "psurr/ratio_math.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace psurr {

namespace {

void require_beta(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("beta must lie in [0, 1]");
  }
}

void require_positive_ratio(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw std::invalid_argument("density ratio must be positive and finite");
  }
}

}  // namespace

DensityRatio density_ratio(double logp_new, double logp_base, double max_ratio) {
  if (!std::isfinite(logp_new) || !std::isfinite(logp_base)) {
    throw std::invalid_argument("density_ratio: log-probabilities must be finite");
  }
  if (!(max_ratio > 1.0)) {
    throw std::invalid_argument("density_ratio: max_ratio must exceed 1");
  }
  const double log_max = std::log(max_ratio);
  const double diff = logp_new - logp_base;
  if (diff > log_max) return {max_ratio, true};
  if (diff < -log_max) return {1.0 / max_ratio, true};
  return {std::exp(diff), false};
}

double relative_ratio(double rho, double beta) {
  require_positive_ratio(rho);
  require_beta(beta);
  if (beta == 0.0) return rho;
  // 1 + beta*(rho - 1) == 1 - beta + beta*rho, exact at rho == 1.
  return rho / (1.0 + beta * (rho - 1.0));
}

double mixture_pdf(double p_new, double p_base, double beta) {
  if (!(p_new >= 0.0) || !(p_base >= 0.0)) {
    throw std::invalid_argument("mixture_pdf: densities must be non-negative");
  }
  require_beta(beta);
  return beta * p_new + (1.0 - beta) * p_base;
}

double pe_divergence_mc(std::span<const double> rho_samples) {
  if (rho_samples.empty()) {
    throw std::invalid_argument("pe_divergence_mc: empty sample list");
  }
  double sum = 0.0;
  for (double rho : rho_samples) {
    require_positive_ratio(rho);
    const double d = rho - 1.0;
    sum += 0.5 * d * d;
  }
  return sum / static_cast<double>(rho_samples.size());
}

double rpe_divergence_mc(std::span<const double> rho_samples, double beta) {
  if (rho_samples.empty()) {
    throw std::invalid_argument("rpe_divergence_mc: empty sample list");
  }
  require_beta(beta);
  double sum = 0.0;
  for (double rho : rho_samples) {
    require_positive_ratio(rho);
    const double weight = 1.0 + beta * (rho - 1.0);
    const double d = relative_ratio(rho, beta) - 1.0;
    sum += weight * 0.5 * d * d;
  }
  return sum / static_cast<double>(rho_samples.size());
}

RatioThresholds ratio_thresholds(double epsilon, double beta, Sign sigma) {
  require_beta(beta);
  const double se = to_double(sigma) * epsilon;
  const double denom = 1.0 - beta * (1.0 + se);
  if (!(denom > 0.0)) {
    std::ostringstream msg;
    msg << "ratio_thresholds: 1 - beta*(1 + sigma*eps) <= 0 for (beta=" << beta
        << ", eps=" << epsilon << ", sigma=" << static_cast<int>(sigma) << ")";
    throw std::domain_error(msg.str());
  }
  return {1.0 + se, 1.0 + se / denom};
}

double regularization_gain(double advantage, double epsilon, double beta, Sign sigma) {
  if (advantage == 0.0) return 0.0;
  require_beta(beta);
  const double se = to_double(sigma) * epsilon;
  const double denom = se * (beta * se + 2.0 * (1.0 - beta * (1.0 + se)));
  if (denom == 0.0 || !std::isfinite(denom)) {
    std::ostringstream msg;
    msg << "regularization_gain: zero denominator for (beta=" << beta << ", eps=" << epsilon
        << ", sigma=" << static_cast<int>(sigma) << ")";
    throw std::domain_error(msg.str());
  }
  return advantage / denom;
}

RatioSample make_ratio_sample(double rho, double advantage, MixtureParams mix) {
  return {rho, relative_ratio(rho, mix.beta), sign_of(advantage), advantage};
}

}  // namespace psurr
