#include <doctest.h>

#include <cmath>

#include "persist/numerics.hpp"
#include "persist/oracles.hpp"
#include "persist/properties.hpp"

using namespace persist;

namespace {

using Q = mpq_class;

// Independent enumeration: E[f], E[g], E[fg] by odometer over support^n.
FkgReport enumerate_fkg(const FiniteLaw& law, int n, const MonotoneFn& f, const MonotoneFn& g) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  Q ef = 0, eg = 0, efg = 0;
  for (;;) {
    std::vector<Q> d;
    Q w = 1;
    for (auto i : idx) {
      d.push_back(law.values[i]);
      w *= law.probs[i];
    }
    const Q a = f(d), b = g(d);
    ef += w * a;
    eg += w * b;
    efg += w * a * b;
    int pos = 0;
    while (pos < n && ++idx[static_cast<std::size_t>(pos)] == law.values.size()) idx[static_cast<std::size_t>(pos++)] = 0;
    if (pos == n) break;
  }
  FkgReport r;
  r.lhs = efg;
  r.rhs = ef * eg;
  r.holds = r.lhs >= r.rhs;
  return r;
}

PathGrid steps_path(const std::vector<double>& s) {
  // values[k] = S_k on 0..N (values[0] unused)
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(s.size()) + 1, 0, static_cast<double>(s.size()));
  Eigen::VectorXd v(t.size());
  v[0] = 0;
  for (std::size_t i = 0; i < s.size(); ++i) v[static_cast<Eigen::Index>(i) + 1] = s[i];
  return PathGrid::make(t, v, Interp::step_left);
}

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("FKG hand cases") {
  const FiniteLaw rad = FiniteLaw::rademacher();
  const auto last = MonotoneFn::custom(
      Direction::increasing, 3,
      [](const std::vector<Q>& d) -> Q { return d[0] + d[1] + d[2]; }, "x3");
  const FkgReport var = fkg_check(rad, 3, last, last);
  CHECK(var.lhs == 3);
  CHECK(var.rhs == 0);
  CHECK(var.holds);

  const auto both_low = MonotoneFn::custom(
      Direction::decreasing, 2,
      [](const std::vector<Q>& d) -> Q { return Q(d[0] <= 0 && d[0] + d[1] <= 0 ? 1 : 0); }, "x1<=0,x2<=0");
  REQUIRE(audit(both_low, rad));
  const FkgReport r = fkg_check(rad, 2, both_low, both_low);
  CHECK(r.lhs == Q(1, 2));
  CHECK(r.rhs == Q(1, 4));
  CHECK(r.holds);

  const auto first = MonotoneFn::custom(Direction::increasing, 2, [](const std::vector<Q>& d) -> Q { return d[0]; }, "d1");
  const auto second = MonotoneFn::custom(Direction::increasing, 2, [](const std::vector<Q>& d) -> Q { return d[1] * d[1] * d[1]; }, "d2^3");
  const FkgReport ind = fkg_check(FiniteLaw::uniform_three(), 2, first, second);
  CHECK(ind.lhs == ind.rhs);

  CHECK_THROWS(fkg_check(rad, 2, first, both_low));
}

TEST_CASE("audit rejects non-monotone functions") {
  const auto bump = MonotoneFn::custom(Direction::increasing, 2, [](const std::vector<Q>& d) -> Q { return -d[0] * d[0]; }, "bump");
  CHECK_FALSE(audit(bump, FiniteLaw::uniform_three()));
  const auto wrong = MonotoneFn::custom(Direction::decreasing, 1, [](const std::vector<Q>& d) -> Q { return d[0]; }, "up");
  CHECK_FALSE(audit(wrong, FiniteLaw::rademacher()));
  CHECK_THROWS(MonotoneFn::from_terms(Direction::increasing, 2, {{MonotoneFn::Term::Kind::ramp, 0, false, -1, 0}}));
}

TEST_CASE("generated monotone functions are sound and match enumeration") {
  for (const auto& law : {FiniteLaw::rademacher(), FiniteLaw::uniform_three()}) {
    for (int k = 0; k < 200; ++k) {
      RngStream rng(71, k);
      const int n = 1 + k % 5;
      const Direction dir = k % 2 ? Direction::increasing : Direction::decreasing;
      const MonotoneFn f = random_monotone(rng, n, dir), g = random_monotone(rng, n, dir);
      REQUIRE(audit(f, law));
      REQUIRE(audit(g, law));
      const FkgReport a = fkg_check(law, n, f, g), b = enumerate_fkg(law, n, f, g);
      CHECK(a.lhs == b.lhs);
      CHECK(a.rhs == b.rhs);
      CHECK(a.holds);
    }
  }
}

TEST_CASE("FKG suite") {
  for (const auto& law : {FiniteLaw::rademacher(), FiniteLaw::uniform_three()}) {
    const FkgSuiteReport r = fkg_suite(law, 6, 1000, 72);
    CHECK(r.pairs == 1000);
    CHECK(r.violations == 0);
    CHECK(r.audit_failures == 0);
  }
}

TEST_CASE("sandwich hand cases") {
  const SandwichReport zero = sandwich_check(steps_path({0, 0, 0}), 2.5);
  CHECK(zero.ceil_integers);
  CHECK(zero.continuous);
  CHECK(zero.floor_integers);
  // steps (+1, +1): S = (1, 2), A_1 = 1, A_1.5 = 2, A_2 = 3
  const SandwichReport up = sandwich_check(steps_path({1, 2}), 1.5);
  CHECK_FALSE(up.ceil_integers);
  CHECK_FALSE(up.continuous);
  CHECK(up.floor_integers);
  CHECK(up.holds);
  // S = (1, 0, 1): A = 0, 1, 1, 2; at T = 2.5 the path is 1.5
  const SandwichReport mid = sandwich_check(steps_path({1, 0, 1}), 2.5);
  CHECK_FALSE(mid.ceil_integers);
  CHECK_FALSE(mid.continuous);
  CHECK(mid.floor_integers);
}

TEST_CASE("sandwich on random walks against a dense evaluation") {
  int violations = 0;
  for (double T : {3.5, 7.25}) {
    for (int i = 0; i < 10'000; ++i) {
      RngStream rng = derive_stream(73, i);
      const PathGrid w = sample_walk(IncrementLaw::rademacher(), 8, rng);
      const SandwichReport r = sandwich_check(w, T);
      violations += !r.holds;
      // dense evaluation of the piecewise-linear A on [0, T]
      double a = 0, sup = 0;
      for (int k = 1; k <= 8; ++k) {
        for (int q = 1; q <= 16; ++q) {
          const double t = k - 1 + q / 16.0;
          if (t > T) break;
          sup = std::max(sup, a + q / 16.0 * w.values[k]);
        }
        if (k - 1 + 1e-12 < T && T < k) sup = std::max(sup, a + (T - (k - 1)) * w.values[k]);
        a += w.values[k];
      }
      CHECK(r.continuous == (sup <= 1.0));
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("semigroup") {
  const PathGrid one = PathGrid::make(Eigen::VectorXd::LinSpaced(5, 0, 4), Eigen::VectorXd::Ones(5), Interp::step_left);
  const std::vector<double> hs{0.125, 0.0625, 0.03125};
  for (double e : semigroup_check(0.0, 0.7, one, hs)) CHECK(e == 0.0);
  const auto err = semigroup_check(0.5, 0.5, one, hs);
  REQUIRE(err.size() == 3);
  CHECK(err[0] > err[1]);
  CHECK(err[1] > err[2]);
  const auto lin = semigroup_check(0.5, 0.5, one, hs, InnerDiscretization::linear);
  CHECK(lin[1] < lin[0]);
  CHECK(lin[2] < lin[1]);

  // I_1 of a step path is piecewise linear on the integers, so the linear
  // re-read is exact and I_1 I_1 = I_2
  RngStream rng(74, 0);
  PathGrid walk = sample_walk(IncrementLaw::rademacher(), 6, rng);
  const auto exact = semigroup_check(1.0, 1.0, walk, {1.0, 0.5}, InnerDiscretization::linear);
  CHECK(exact[0] < 1e-12);
  CHECK(exact[1] < 1e-12);
  const auto steps = semigroup_check(1.0, 1.0, walk, hs);
  CHECK(steps[0] > steps[2]);
}

TEST_CASE("slepian domination") {
  const SlepianReport r = slepian_corr_check(50, 10.0, 0.01);
  CHECK(r.max_violation <= 1e-9);
  CHECK(r.max_gap_at_zero <= 1e-9);
  CHECK(r.zero_gap_points == 0);
  CHECK(r.max_closed_form_error < 1e-8);
  REQUIRE(r.gap_at_one.size() == 50);
  CHECK(r.gap_at_one[0] == doctest::Approx(0.88681 - 0.79823).epsilon(1e-3));
  for (double g : r.min_gap) CHECK(g > 0);
}

TEST_CASE("drift bracket cases") {
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(1, 1);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(1), f = Eigen::VectorXd::Zero(1);
  RngStream rng(75, 0);
  const DriftCase none = drift_bracket_case(cov, f, c, 20'000, rng);
  CHECK(none.ratio == 1.0);
  CHECK(none.lower == 1.0);
  CHECK(none.upper == 1.0);
  CHECK_FALSE(none.violation);

  f[0] = 0.5;
  const DriftCase half = drift_bracket_case(cov, f, c, 400'000, rng);
  const double exact = normal_cdf(-0.5) / 0.5;
  CHECK(exact == doctest::Approx(0.6170).epsilon(1e-3));
  CHECK(std::abs(half.ratio - exact) < 3 * half.ratio_stderr);
  CHECK(half.cm_norm == doctest::Approx(0.5));
  CHECK(half.lower < exact);
  CHECK(exact < half.upper);
  CHECK_FALSE(half.violation);
}

TEST_CASE("drift bracket suite within budget") {
  const DriftReport r = drift_bracket_check(8, 1000, 5000, 76);
  CHECK(r.cases == 1000);
  CHECK(r.budget == 3);
  CHECK(r.violations <= r.budget);
}

}
