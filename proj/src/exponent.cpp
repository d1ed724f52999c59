#include "persist/exponent.hpp"

#include <algorithm>
#include <cmath>

namespace persist {

double log_correction_allowance(double alpha, double T_max) {
  if (!(T_max > std::exp(1.0))) return 0.0;
  const double l = std::log(T_max);
  return 2.0 * (1.0 + alpha) * std::log(l) / l;
}

namespace {

void check_curve(std::span<const double> x, std::span<const double> p) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(p[i] > 0)) throw InsufficientDataError("fit: zero survival estimate; increase trials");
    if (!(x[i] > 0)) throw DomainError("fit: horizons must be positive");
    if (i > 0 && !(x[i] > x[i - 1])) throw DomainError("fit: horizons must be increasing");
  }
}

int fit_skip(int k, const FitOptions& options) {
  if (k < 4) throw InsufficientDataError("fit: need at least 4 curve points");
  const int skip = options.exclude_smallest == FitOptions::kAuto ? std::min(2, k - 4) : options.exclude_smallest;
  if (skip < 0 || k - skip < 4) throw InsufficientDataError("fit: fewer than 4 points left in the fit window");
  return skip;
}

}  // namespace

ExponentFit fit_power_law(std::span<const double> x, std::span<const double> p, std::span<const std::int64_t> n,
                          const FitOptions& options) {
  if (p.size() != x.size() || n.size() != x.size()) throw DomainError("fit: input lengths differ");
  fit_skip(static_cast<int>(x.size()), options);
  check_curve(x, p);
  std::vector<double> w(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double nn = static_cast<double>(std::max<std::int64_t>(n[i], 1));
    // p = 1 would give infinite weight; cap 1 - p at half a trial
    w[i] = nn * p[i] / std::max(1.0 - p[i], 0.5 / nn);
  }
  return fit_power_law_weighted(x, p, w, options);
}

ExponentFit fit_power_law_weighted(std::span<const double> x, std::span<const double> p, std::span<const double> weights,
                                   const FitOptions& options) {
  const auto k = static_cast<int>(x.size());
  if (p.size() != x.size() || weights.size() != x.size()) throw DomainError("fit: input lengths differ");
  const int skip = fit_skip(k, options);
  check_curve(x, p);

  const int m = k - skip;
  Eigen::MatrixXd X(m, 2);
  Eigen::VectorXd y(m), w(m);
  for (int j = 0; j < m; ++j) {
    const int i = j + skip;
    if (!(weights[i] > 0) || !std::isfinite(weights[i])) throw DomainError("fit: weights must be positive");
    X(j, 0) = 1.0;
    X(j, 1) = std::log(x[i]);
    y[j] = std::log(p[i]);
    w[j] = weights[i];
  }
  const Eigen::Matrix2d xtwx = X.transpose() * w.asDiagonal() * X;
  const Eigen::Vector2d xtwy = X.transpose() * w.asDiagonal() * y;
  const Eigen::Matrix2d cov = xtwx.inverse();
  const Eigen::Vector2d beta = cov * xtwy;

  const Eigen::VectorXd resid = y - X * beta;
  const double ybar = w.dot(y) / w.sum();
  const double ss_tot = (w.array() * (y.array() - ybar).square()).sum();
  const double ss_res = (w.array() * resid.array().square()).sum();

  ExponentFit fit;
  fit.theta_hat = -beta[1];
  fit.intercept = beta[0];
  fit.stderr_theta = std::sqrt(std::max(0.0, cov(1, 1)));
  fit.T_min = x[skip];
  fit.T_max = x[k - 1];
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.residual_max = resid.cwiseAbs().maxCoeff();
  fit.n_points = m;
  if (options.allowance_order) fit.log_correction_allowance = log_correction_allowance(*options.allowance_order, fit.T_max);
  return fit;
}

ExponentFit fit_exponent(std::span<const SurvivalEstimate> curve, const FitOptions& options) {
  std::vector<double> x, p;
  std::vector<std::int64_t> n;
  for (const auto& e : curve) {
    x.push_back(e.T);
    p.push_back(e.p_hat);
    n.push_back(e.n_trials);
  }
  return fit_power_law(x, p, n, options);
}

Verdict compare_exponents(const ExponentFit& a, const ExponentFit& b, CompareMode mode, double z) {
  Verdict v;
  v.z = z;
  v.allowance = a.log_correction_allowance + b.log_correction_allowance;
  v.difference = a.theta_hat - b.theta_hat;
  v.slack = z * std::hypot(a.stderr_theta, b.stderr_theta) + v.allowance;
  v.holds = mode == CompareMode::equal ? std::abs(v.difference) <= v.slack : v.difference >= -v.slack;
  return v;
}

RateBound subadditive_rate(std::span<const SurvivalEstimate> curve, double scale) {
  if (curve.empty()) throw InsufficientDataError("subadditive_rate: empty curve");
  RateBound out;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : curve) {
    if (!(e.p_hat > 0)) throw InsufficientDataError("subadditive_rate: zero survival estimate; increase trials");
    if (!(e.T > 0)) throw DomainError("subadditive_rate: T must be positive");
    const double r = -scale * std::log(e.p_hat) / e.T;
    out.rates.push_back(r);
    if (r < best) {
      best = r;
      const double se_log = std::sqrt((1 - e.p_hat) / (static_cast<double>(e.n_trials) * e.p_hat));
      const double half = kZ95 * scale * se_log / e.T;
      out.rate_bound = r;
      out.ci = {r - half, r + half};
      out.T_at = e.T;
    }
  }
  return out;
}

}  // namespace persist
