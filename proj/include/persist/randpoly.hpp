#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "persist/survival.hpp"

namespace persist {

/// Polynomial with exact rational coefficients, index i holding x^i.
struct IntPolynomial {
  std::vector<mpq_class> coeffs;

  static IntPolynomial from_doubles(const std::vector<double>& c);

  /// Degree after dropping zero leading coefficients; -1 for the zero polynomial.
  int degree() const;
  bool is_zero() const { return degree() < 0; }
  mpq_class leading() const;
  mpq_class operator()(const mpq_class& x) const;
};

using ZPoly = std::vector<mpz_class>;

/// Positive multiple of p with coprime integer coefficients.
ZPoly primitive_integer(const IntPolynomial& p);

/// Sturm chain of a square-free integer polynomial by a primitive
/// pseudo-remainder sequence with the signs of true remainders.
std::vector<ZPoly> sturm_chain(const ZPoly& p);

/// Number of distinct real roots; Sturm on the square-free part.
int real_root_count(const IntPolynomial& p);

/// Exact sign of p at x = k / 2^s for integer p.
int sign_at_dyadic(const ZPoly& p, const mpz_class& k, unsigned s);

struct RandpolyEstimate {
  int n = 0;                          // degree 2n
  std::int64_t n_trials = 0;
  std::int64_t n_event = 0;           // no real zero and leading < 0
  std::int64_t n_no_real_zero = 0;
  std::int64_t n_mirror = 0;          // no real zero and leading > 0
  std::int64_t n_sturm = 0;           // trials not settled by the exact prescreen
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  double p_symmetric = 0.0;           // n_no_real_zero / (2 n_trials)
  double p_symmetric_stderr = 0.0;
  std::uint64_t master_seed = 0;

  double standard_error() const;
};

/// The real polynomial with coefficients drawn for trial `trial` (i.i.d.
/// standard normals rounded to doubles, leading coefficient redrawn if zero).
IntPolynomial random_polynomial(int n, std::uint64_t seed, std::uint64_t trial);

/*!
 * P(sum_{i <= 2n} xi_i x^i <= 0 for all real x) by Monte Carlo. A trial is
 * an event when the polynomial has no real zero and a negative leading
 * coefficient. A sign opposite to the leading coefficient found by exact
 * evaluation at dyadic points settles a trial without a Sturm chain.
 */
RandpolyEstimate estimate_nonpositive_prob(int n, std::int64_t trials, std::uint64_t seed);

}  // namespace persist
