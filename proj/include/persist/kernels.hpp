#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <string>

#include "persist/errors.hpp"
#include "persist/paths.hpp"

namespace persist {

/// Constants of the envelope K(s) <= k (s^{alpha-1} + s^{beta-1}), alpha >= beta.
struct KernelBound {
  double k = 1.0;
  double alpha = 1.0;
  double beta = 1.0;

  double envelope(double s) const { return k * (std::pow(s, alpha - 1) + std::pow(s, beta - 1)); }
};

/*!
 * Convolution kernel K of the functional I(X)_t = int_0^t K(t-s) X_s ds.
 *
 * fractional(a): K(s) = s^{a-1} / Gamma(a), envelope k = 1/Gamma(a), alpha =
 * beta = a. table: samples (s_i, K_i) read by linear interpolation, held
 * constant outside the sampled range.
 */
struct KernelSpec {
  enum class Kind { fractional, table };

  Kind kind = Kind::fractional;
  double alpha = 1.0;
  Eigen::VectorXd table_s;
  Eigen::VectorXd table_k;
  KernelBound bound;

  static KernelSpec fractional(double alpha);
  static KernelSpec table(Eigen::VectorXd s, Eigen::VectorXd k, KernelBound bound);
  /// Two columns "s,K" with a header row; s strictly increasing and positive.
  static KernelSpec load_csv(const std::string& path, KernelBound bound);

  bool is_fractional() const { return kind == Kind::fractional; }
  std::string name() const;
};

/// K(s) for s > 0. Throws ContractViolation when K(s) exceeds the envelope.
double kernel_eval(const KernelSpec& spec, double s);

/// U^p - L^p for U >= L >= 0 without cancellation when U - L << L.
template <typename Scalar>
Scalar pow_difference(Scalar upper, Scalar lower, Scalar p) {
  if (lower <= 0) return std::pow(upper, p);
  return std::pow(lower, p) * std::expm1(p * std::log1p((upper - lower) / lower));
}

/*!
 * Weights w_i = int over the i-th cell of (t-s)^{a-1} / Gamma(a) ds, where
 * cell i is [grid[i], grid[i+1]) truncated at t and the last cell is
 * [grid.back(), t]. Closed form ((t-a)^a - (t-b)^a) / Gamma(a+1).
 */
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> frac_weights(Scalar alpha, std::span<const Scalar> grid, Scalar t) {
  if (!(alpha > 0)) throw DomainError("frac_weights: alpha must be positive");
  if (grid.empty() || t < grid[0]) throw DomainError("frac_weights: t below grid start");
  const auto n = static_cast<Eigen::Index>(grid.size());
  const Scalar gamma = std::tgamma(alpha + 1);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar a = grid[static_cast<std::size_t>(i)];
    if (a >= t) break;
    const Scalar b = (i + 1 < n) ? std::min(grid[static_cast<std::size_t>(i + 1)], t) : t;
    w[i] = pow_difference<Scalar>(t - a, t - b, alpha) / gamma;
  }
  return w;
}

/*!
 * I(X) at the evaluation times, as a points-mode path.
 *
 * Step paths with fractional kernels are integrated exactly through
 * frac_weights; linear paths with fractional kernels use the exact
 * antiderivative of the kernel against each linear piece. Table kernels use
 * 16-point Gauss-Legendre per cell. The integral runs from x.start().
 */
PathGrid convolve(const KernelSpec& spec, const PathGrid& x, std::span<const double> eval_times);

/// Y_u = c e^{-u (alpha + 1/2)} x(e^u) at u = log t for each sample time
/// t >= 1, with c = Gamma(alpha+1) sqrt(2 alpha + 1) when normalized.
PathGrid lamperti(const PathGrid& x, double alpha, bool normalize);

}  // namespace persist
