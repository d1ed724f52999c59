#pragma once

#include <utility>
#include <variant>

#include "persist/paths.hpp"

namespace persist {

/// P(sup_{s <= T} sigma W_s <= level) = erf(level / (sigma sqrt(2T))), zero
/// for level <= 0.
double bm_no_exit_prob(double sigma, double level, double T);

struct LineNoHit {
  double probability = 0.0;
  bool degenerate = false;  // a <= 0: the line starts at or below the origin
};

/// P(sigma W_t < a + slope t for all t <= T), Bachelier-Levy formula.
LineNoHit bm_line_no_hit_prob(double a, double slope, double sigma, double T);

/// int_0^1 v^alpha (d + c v)^alpha dv for d >= 0, c >= 0.
double power_product_integral(double alpha, double d, double c);

/*!
 * Correlation function of the Lamperti-transformed Riemann-Liouville
 * process of the given order, or of the limiting stationary process
 * 2 e^{-tau/2} / (1 + e^{-tau}).
 *
 * Liouville orders use adaptive quadrature (relative 1e-10) of
 * (2a+1) e^{-tau/2} int_0^1 ((1 - e^{-tau} u)(1 - u))^a du.
 */
double corr(const CorrModel& model, double tau);

/// Liouville correlation at integer order from the positive binomial sum
/// (2n+1) e^{-tau/2} sum_k C(n,k) (1-e^{-tau})^{n-k} e^{-k tau} / (n+k+1).
double corr_liouville_closed_form(int n, double tau);

/// Non-integer Liouville orders extend the integer formula; results for
/// them are labelled extrapolated.
bool corr_is_extrapolated(const CorrModel& model);

struct SkorokhodBound {
  double sigma = 1.0;
  double level = 1.0;  // b_t
  double t = 1.0;
};
struct PolynomialBound {
  double alpha = 0.0;
  double T = 1.0;
  double c = 1.0;
};

/// sqrt(2 b^2 / (pi sigma^2 t)), or c T^{-(alpha + 1/2)}.
double apriori_bound(const std::variant<SkorokhodBound, PolynomialBound>& params);

struct Bracket {
  double lower = 1.0;
  double upper = 1.0;
  /// The upper factor comes from a Hoelder exponent 1/p = 1 - |f| / sqrt(2
  /// log(1/p0)) and is only proven when that is positive, |f|^2 < 2 log(1/p0).
  bool upper_proven = true;

  /// The upper factor when proven, otherwise the trivial 1 / p0.
  double proven_upper(double p0) const { return upper_proven ? upper : 1.0 / p0; }
};

/// Multiplicative bracket for P(X + f in S) / P(X in S) given p0 = P(X in S)
/// and the Cameron-Martin norm of f:
/// exp(+-sqrt(2 |f|^2 log(1/p0)) - |f|^2 / 2).
Bracket cameron_martin_bracket(double p0, double cm_norm);

/// Known survival exponents theta(alpha); only alpha = 0 and 1 are known.
double reference_theta(double alpha);
/// 1 - H.
double reference_fbm_exponent(double hurst);
/// theta / H, the small-ball exponent of a self-similar process.
double reference_lower_tail_exponent(double theta, double hurst);
/// (0.4, 1.0): the known lower bound on b and the upper bound 4 theta(1).
std::pair<double, double> reference_b_bracket();

}  // namespace persist
