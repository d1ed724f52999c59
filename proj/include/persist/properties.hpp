#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "persist/kernels.hpp"
#include "persist/paths.hpp"
#include "persist/rng.hpp"

namespace persist {

// ---------------------------------------------------------------------------
// FKG on finite lattices
// ---------------------------------------------------------------------------

/// Increment law with finite support and exact rational probabilities.
struct FiniteLaw {
  std::vector<mpq_class> values;  // strictly increasing
  std::vector<mpq_class> probs;

  static FiniteLaw rademacher();
  /// Uniform on {-1, 0, +1}.
  static FiniteLaw uniform_three();
  std::string name() const;
};

enum class Direction { increasing, decreasing };

/*!
 * f(x) = g(x_1, x_2 - x_1, ..., x_n - x_{n-1}) with g monotone in every
 * coordinate, all in the same direction. Such f are monotone for the order
 * x >= y iff x_1 >= y_1 and (x_i - y_i) is increasing.
 *
 * Ramp terms w max(0, u - a) and step terms w 1{u >= a}, with w >= 0 and u
 * an increment d_i or a position x_i, are all nondecreasing in every d_j;
 * decreasing functions negate the sum.
 */
class MonotoneFn {
 public:
  struct Term {
    enum class Kind { ramp, step };
    Kind kind = Kind::ramp;
    int coord = 0;
    bool on_position = false;
    mpq_class weight = 1;
    mpq_class knot = 0;
  };

  static MonotoneFn from_terms(Direction dir, int n, std::vector<Term> terms);
  /// Arbitrary g of the increments with a declared direction; must pass audit().
  static MonotoneFn custom(Direction dir, int n, std::function<mpq_class(const std::vector<mpq_class>&)> g,
                           std::string description);

  Direction direction() const { return dir_; }
  int arity() const { return n_; }
  const std::string& description() const { return description_; }

  /// Value at the increment vector d.
  mpq_class operator()(const std::vector<mpq_class>& d) const;

 private:
  Direction dir_ = Direction::increasing;
  int n_ = 0;
  std::function<mpq_class(const std::vector<mpq_class>&)> g_;
  std::string description_;
};

/// Random sum of 1..4 ramp or step terms with small integer weights and
/// half-integer knots.
MonotoneFn random_monotone(RngStream& rng, int n, Direction dir);

/// Checks coordinatewise monotonicity of g on support^n in the declared direction.
bool audit(const MonotoneFn& f, const FiniteLaw& law);

struct FkgReport {
  mpq_class lhs;  // E[f g]
  mpq_class rhs;  // E[f] E[g]
  bool holds = false;
};

/// Exact E[f g] >= E[f] E[g] by enumerating all |support|^n increment
/// sequences. f and g of opposite directions are rejected.
FkgReport fkg_check(const FiniteLaw& law, int n, const MonotoneFn& f, const MonotoneFn& g);

struct FkgSuiteReport {
  int pairs = 0;
  int violations = 0;
  int audit_failures = 0;
};

/// Random same-direction pairs with n in 1..n_max, each audited before use.
FkgSuiteReport fkg_suite(const FiniteLaw& law, int n_max, int pairs, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Sandwich
// ---------------------------------------------------------------------------

struct SandwichReport {
  bool ceil_integers = false;  // sup over {0, ..., ceil T} <= level
  bool continuous = false;     // sup over [0, T] <= level
  bool floor_integers = false; // sup over {0, ..., floor T} <= level
  bool holds = false;
};

/*!
 * Pathwise indicator chain for A = I_1(X) of a walk given as a step path on
 * 0, 1, ..., N with N >= ceil(T). A is piecewise linear with
 * A_n = S_1 + ... + S_n.
 */
SandwichReport sandwich_check(const PathGrid& walk, double T, double level = 1.0);

// ---------------------------------------------------------------------------
// Semigroup
// ---------------------------------------------------------------------------

/// How the inner I_beta path is re-discretized on the step-h grid.
enum class InnerDiscretization { step, linear };

/*!
 * max_t |I_alpha(I_beta X)_t - I_{alpha+beta}(X)_t| for each h, where the
 * inner path is sampled on the grid {start, start + h, ...} and re-read as a
 * step (or linear) path. The maximum runs over the grid of the largest h.
 * A zero order is the identity and gives zero error.
 */
std::vector<double> semigroup_check(double alpha, double beta, const PathGrid& x, const std::vector<double>& h_list,
                                    InnerDiscretization inner = InnerDiscretization::step);

// ---------------------------------------------------------------------------
// Correlation domination
// ---------------------------------------------------------------------------

struct SlepianReport {
  double max_violation = 0.0;       // max over grid of corr_n - corr_limit, floored at 0
  double max_gap_at_zero = 0.0;     // max |corr_limit(0) - corr_n(0)|
  double max_closed_form_error = 0.0;  // quadrature vs binomial closed form
  int zero_gap_points = 0;          // tau > 0 with gap <= 1e-9
  std::vector<double> min_gap;      // per n, min gap over tau > 0
  std::vector<double> gap_at_one;   // per n, gap at tau = 1
};

SlepianReport slepian_corr_check(int n_max, double tau_max, double step);

// ---------------------------------------------------------------------------
// Cameron-Martin brackets
// ---------------------------------------------------------------------------

struct DriftCase {
  std::uint64_t seed = 0;
  int dim = 0;
  double p0 = 0.0;
  double ratio = 0.0;
  double ratio_stderr = 0.0;
  double cm_norm = 0.0;
  double lower = 0.0;
  double upper = 0.0;  // proven upper factor, 1 / p0 outside its range
  bool violation = false;
};

/// P(X + f <= c) / P(X <= c) componentwise for X ~ N(0, cov), estimated from
/// the same draws, against the bracket at the estimated p0.
DriftCase drift_bracket_case(const Eigen::MatrixXd& cov, const Eigen::VectorXd& f, const Eigen::VectorXd& c,
                             std::int64_t trials, RngStream& rng);

struct DriftReport {
  int cases = 0;
  int skipped = 0;  // singular covariance
  int violations = 0;
  int budget = 0;   // floor(0.003 cases)
  std::vector<DriftCase> failing;
};

/// Random cases with dimension 1..dim, well-conditioned random covariance,
/// shift of norm up to 1.5, and a box calibrated to p0 in [0.05, 0.8].
DriftReport drift_bracket_check(int dim, int n_cases, std::int64_t mc_trials, std::uint64_t seed);

}  // namespace persist
