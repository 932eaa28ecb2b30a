#pragma once

#include <span>

namespace psurr {

/// Sign of the advantage. Zero advantage maps to +1; callers short-circuit
/// A == 0 before the sign can matter.
enum class Sign : int { negative = -1, positive = +1 };

inline double to_double(Sign s) { return static_cast<double>(static_cast<int>(s)); }
inline Sign sign_of(double advantage) { return advantage < 0.0 ? Sign::negative : Sign::positive; }

inline constexpr double kDefaultMaxRatio = 1e6;

struct DensityRatio {
  double value;
  bool clamped;
};

/// exp(logp_new - logp_base), clamped to [1/max_ratio, max_ratio].
DensityRatio density_ratio(double logp_new, double logp_base,
                           double max_ratio = kDefaultMaxRatio);

/// rho / (1 - beta + beta*rho). Lies in [0, 1/beta) for beta > 0.
double relative_ratio(double rho, double beta);

/// beta*p_new + (1 - beta)*p_base.
double mixture_pdf(double p_new, double p_base, double beta);

/// Monte-Carlo Pearson divergence over ratios sampled under the baseline:
/// mean of 0.5*(rho - 1)^2.
double pe_divergence_mc(std::span<const double> rho_samples);

/// Monte-Carlo relative Pearson divergence from baseline samples. Each term is
/// importance weighted by pi_beta/pi_b = 1 - beta + beta*rho.
double rpe_divergence_mc(std::span<const double> rho_samples, double beta);

struct RatioThresholds {
  double rho_beta_eps;  // 1 + sigma*eps
  double rho_eps;       // raw-ratio threshold mapping onto rho_beta_eps
};

/// Throws std::domain_error when 1 - beta*(1 + sigma*eps) <= 0.
RatioThresholds ratio_thresholds(double epsilon, double beta, Sign sigma);

/// Gain C making the effective advantage vanish at the threshold. Scales
/// linearly with the advantage. Returns 0 for advantage == 0.
double regularization_gain(double advantage, double epsilon, double beta, Sign sigma);

struct MixtureParams {
  double beta = 0.5;
};

/// One transition's ratio quadruple.
struct RatioSample {
  double rho;
  double rho_beta;
  Sign sigma;
  double advantage;
};

RatioSample make_ratio_sample(double rho, double advantage, MixtureParams mix);

}  // namespace psurr
