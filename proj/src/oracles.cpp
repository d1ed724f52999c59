#include "persist/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "persist/numerics.hpp"

namespace persist {

double bm_no_exit_prob(double sigma, double level, double T) {
  if (!(sigma > 0) || !(T > 0)) throw DomainError("bm_no_exit_prob: sigma and T must be positive");
  if (level <= 0) return 0.0;
  return std::erf(level / (sigma * std::sqrt(2.0 * T)));
}

LineNoHit bm_line_no_hit_prob(double a, double slope, double sigma, double T) {
  if (!(sigma > 0) || !(T > 0)) throw DomainError("bm_line_no_hit_prob: sigma and T must be positive");
  if (a <= 0) return {0.0, true};
  const double sd = sigma * std::sqrt(T);
  const double first = normal_cdf((a + slope * T) / sd);
  // e^{-2 a slope / sigma^2} Phi(...) evaluated in log space, the factor can
  // overflow while the product stays small
  const double x = (-a + slope * T) / sd;
  const double log_second = -2.0 * a * slope / (sigma * sigma) + std::log(normal_cdf(x));
  const double p = first - std::exp(log_second);
  return {std::clamp(p, 0.0, 1.0), false};
}

double power_product_integral(double alpha, double d, double c) {
  if (alpha < 0 || d < 0 || c < 0) throw DomainError("power_product_integral: negative argument");
  if (alpha == 0) return 1.0;
  if (d == 0) return std::pow(c, alpha) / (2 * alpha + 1);
  if (c == 0) return std::pow(d, alpha) / (alpha + 1);
  // v = w^{1/(alpha+1)} absorbs the v^alpha endpoint singularity
  const double p = 1.0 / (alpha + 1.0);
  auto f = [&](double w) { return std::pow(d + c * std::pow(w, p), alpha); };
  return p * integrate<double>(f, 0.0, 1.0, 1e-12);
}

double corr(const CorrModel& model, double tau) {
  if (!(tau >= 0)) throw DomainError("corr: tau must be nonnegative");
  if (model.kind == CorrModel::Kind::limit) return 1.0 / std::cosh(tau / 2);
  const double a = model.order;
  const double e = std::exp(-tau);
  const double integral = power_product_integral(a, -std::expm1(-tau), e);
  return std::min(1.0, (2 * a + 1) * std::exp(-tau / 2) * integral);
}

double corr_liouville_closed_form(int n, double tau) {
  if (n < 0) throw DomainError("corr_liouville_closed_form: negative order");
  if (!(tau >= 0)) throw DomainError("corr_liouville_closed_form: tau must be nonnegative");
  const double q = -std::expm1(-tau);  // 1 - e^{-tau}
  const double e = std::exp(-tau);
  double sum = 0.0;
  double binom = 1.0;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) binom *= static_cast<double>(n - k + 1) / k;
    sum += binom * std::pow(q, n - k) * std::pow(e, k) / (n + k + 1);
  }
  return (2 * n + 1) * std::exp(-tau / 2) * sum;
}

bool corr_is_extrapolated(const CorrModel& model) {
  return model.kind == CorrModel::Kind::liouville && model.order != std::floor(model.order);
}

double apriori_bound(const std::variant<SkorokhodBound, PolynomialBound>& params) {
  if (const auto* s = std::get_if<SkorokhodBound>(&params)) {
    if (!(s->sigma > 0) || !(s->t > 0)) throw DomainError("apriori_bound: sigma and t must be positive");
    return std::sqrt(2.0 * s->level * s->level / (std::numbers::pi * s->sigma * s->sigma * s->t));
  }
  const auto& p = std::get<PolynomialBound>(params);
  if (!(p.T >= 1)) throw DomainError("apriori_bound: polynomial bound needs T >= 1");
  return p.c * std::pow(p.T, -(p.alpha + 0.5));
}

Bracket cameron_martin_bracket(double p0, double cm_norm) {
  if (!(p0 > 0) || p0 > 1) throw DomainError("cameron_martin_bracket: p0 must lie in (0, 1]");
  if (cm_norm < 0) throw DomainError("cameron_martin_bracket: negative norm");
  const double n2 = cm_norm * cm_norm;
  const double spread = p0 == 1.0 ? 0.0 : std::sqrt(2.0 * n2 * std::log(1.0 / p0));
  return {std::exp(-spread - n2 / 2), std::exp(spread - n2 / 2), p0 == 1.0 ? n2 == 0 : n2 < 2.0 * std::log(1.0 / p0)};
}

double reference_theta(double alpha) {
  if (alpha == 0.0) return 0.5;
  if (alpha == 1.0) return 0.25;
  throw UnknownValueError("theta(alpha) is not known in closed form for alpha outside {0, 1}");
}

double reference_fbm_exponent(double hurst) {
  if (!(hurst > 0 && hurst < 1)) throw DomainError("fbm exponent: H must lie in (0, 1)");
  return 1.0 - hurst;
}

double reference_lower_tail_exponent(double theta, double hurst) {
  if (!(hurst > 0)) throw DomainError("lower tail exponent: H must be positive");
  return theta / hurst;
}

std::pair<double, double> reference_b_bracket() { return {0.4, 1.0}; }

}  // namespace persist
