#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "persist/survival.hpp"

namespace persist {

struct ExponentFit {
  double theta_hat = 0.0;
  double stderr_theta = 0.0;
  double intercept = 0.0;  // log p = intercept - theta log T
  double T_min = 0.0;
  double T_max = 0.0;
  double r_squared = 1.0;
  double residual_max = 0.0;
  double log_correction_allowance = 0.0;
  int n_points = 0;
};

struct FitOptions {
  static constexpr int kAuto = -1;
  /// Smallest horizons dropped from the fit; kAuto drops min(2, k - 4).
  int exclude_smallest = kAuto;
  /// Functional order alpha used for the allowance 2 (1 + alpha) loglog T / log T;
  /// empty means no allowance.
  std::optional<double> allowance_order;
};

/// 2 (1 + alpha) log log T_max / log T_max (zero when T_max <= e).
double log_correction_allowance(double alpha, double T_max);

/*!
 * Weighted least squares of log p on log x with weights n p / (1 - p), the
 * inverse delta-method variance of log p_hat. theta_hat is minus the slope;
 * its standard error comes from (X^T W X)^{-1}.
 */
ExponentFit fit_power_law(std::span<const double> x, std::span<const double> p, std::span<const std::int64_t> n,
                          const FitOptions& options = {});

/// The same regression with explicit weights. Multiplying p by a constant
/// at fixed weights moves only the intercept.
ExponentFit fit_power_law_weighted(std::span<const double> x, std::span<const double> p,
                                   std::span<const double> weights, const FitOptions& options = {});

/// fit_power_law on (T, p_hat, n_trials) of a survival curve.
ExponentFit fit_exponent(std::span<const SurvivalEstimate> curve, const FitOptions& options = {});

enum class CompareMode { equal, monotone_geq };

struct Verdict {
  bool holds = false;
  double difference = 0.0;  // theta_a - theta_b
  double slack = 0.0;       // z sqrt(se_a^2 + se_b^2) + allowance_a + allowance_b
  double z = 2.0;
  double allowance = 0.0;
};

/// equal: |theta_a - theta_b| <= slack. monotone_geq: theta_a >= theta_b - slack.
Verdict compare_exponents(const ExponentFit& a, const ExponentFit& b, CompareMode mode, double z = 2.0);

struct RateBound {
  double rate_bound = 0.0;  // min over T of -scale log p_hat(T) / T
  Interval ci;              // delta-method 95% interval at the minimizing T
  double T_at = 0.0;
  std::vector<double> rates;
};

/*!
 * Finite-horizon bounds r(T) = -scale log P(T) / T for a stationary
 * persistence curve. Superadditivity of log P makes each r(T) an upper
 * bound of the limit; the smallest is returned.
 */
RateBound subadditive_rate(std::span<const SurvivalEstimate> curve, double scale = 4.0);

}  // namespace persist
