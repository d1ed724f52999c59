#include <doctest.h>

#include <cmath>
#include <numbers>

#include "persist/numerics.hpp"
#include "persist/oracles.hpp"
#include "persist/rng.hpp"

using namespace persist;

namespace {

struct McResult {
  double p;
  double se;
};

// Continuous-time survival of sigma W below the line a + slope t on [0, T]:
// W on a coarse grid, and per cell the exact probability that the Brownian
// bridge stays below the (linear) barrier, exp(-2 (g0 - x)(g1 - y) / (sigma^2 h)).
McResult bridge_mc(double a, double slope, double sigma, double T, int cells, int trials, std::uint64_t seed) {
  const double h = T / cells;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < trials; ++i) {
    RngStream rng = derive_stream(seed, static_cast<std::uint64_t>(i));
    double x = 0, weight = 1;
    for (int k = 0; k < cells && weight > 0; ++k) {
      const double y = x + sigma * std::sqrt(h) * rng.normal();
      const double g0 = a + slope * k * h, g1 = a + slope * (k + 1) * h;
      if (y >= g1) {
        weight = 0;
        break;
      }
      weight *= -std::expm1(-2 * (g0 - x) * (g1 - y) / (sigma * sigma * h));
      x = y;
    }
    sum += weight;
    sum2 += weight * weight;
  }
  const double p = sum / trials;
  return {p, std::sqrt((sum2 / trials - p * p) / trials)};
}

// int_0^1 ((1 - e^{-tau} u)(1 - u))^a du by plain quadrature, no substitution.
double corr_by_quadrature(double a, double tau) {
  const double e = std::exp(-tau);
  const double i = integrate<double>([&](double u) { return std::pow((1 - e * u) * (1 - u), a); }, 0.0, 1.0, 1e-12);
  return (2 * a + 1) * std::exp(-tau / 2) * i;
}

}  // namespace

TEST_SUITE("oracles") {

TEST_CASE("no-exit probability") {
  CHECK(bm_no_exit_prob(1, 0, 1) == 0.0);
  CHECK(bm_no_exit_prob(1, -2, 1) == 0.0);
  CHECK(bm_no_exit_prob(1, 1, 1) == doctest::Approx(2 * normal_cdf(1.0) - 1).epsilon(1e-14));
  CHECK(bm_no_exit_prob(1, 1, 1) == doctest::Approx(0.682689).epsilon(1e-6));
  CHECK(bm_no_exit_prob(1, 1, 1e4) == doctest::Approx(std::sqrt(2 / std::numbers::pi) * 1e-2).epsilon(1e-4));
  CHECK(bm_no_exit_prob(1, 1, 1e4) == doctest::Approx(0.0079788).epsilon(1e-4));
  CHECK_THROWS(bm_no_exit_prob(0, 1, 1));
}

TEST_CASE("no-exit probability against the bridge Monte Carlo") {
  const McResult mc = bridge_mc(1.0, 0.0, 1.0, 1.0, 64, 1'000'000, 41);
  CHECK(std::abs(mc.p - bm_no_exit_prob(1, 1, 1)) < 3 * mc.se);
}

TEST_CASE("line no-hit probability") {
  CHECK(bm_line_no_hit_prob(1.3, 0, 1.2, 7).probability == doctest::Approx(bm_no_exit_prob(1.2, 1.3, 7)).epsilon(1e-13));
  const double expect = normal_cdf(-0.9) - std::exp(0.2) * normal_cdf(-1.1);
  const LineNoHit r = bm_line_no_hit_prob(1, -0.1, 1, 100);
  CHECK_FALSE(r.degenerate);
  CHECK(r.probability == doctest::Approx(expect).epsilon(1e-12));
  CHECK(r.probability == doctest::Approx(0.0183).epsilon(5e-3));
  CHECK(bm_line_no_hit_prob(0, 1, 1, 1).degenerate);
  CHECK(bm_line_no_hit_prob(-1, 1, 1, 1).probability == 0.0);

  const McResult mc = bridge_mc(1.0, -0.1, 1.0, 100.0, 200, 200'000, 42);
  CHECK(std::abs(mc.p - r.probability) < 3 * mc.se);
  const McResult up = bridge_mc(0.5, 0.3, 1.5, 4.0, 64, 200'000, 43);
  CHECK(std::abs(up.p - bm_line_no_hit_prob(0.5, 0.3, 1.5, 4.0).probability) < 3 * up.se);
}

TEST_CASE("line barrier through 1 - t / sqrt(T) decays like T^{-1/2}") {
  for (double T : {1e2, 1e3, 1e4}) {
    const double scaled = bm_line_no_hit_prob(1, -1 / std::sqrt(T), 1, T).probability * std::sqrt(T);
    CHECK(scaled > 0.1);
    CHECK(scaled < 10);
  }
}

TEST_CASE("monotonicity of the closed forms") {
  double prev = 0;
  for (double b = 0.1; b < 5; b += 0.1) {
    const double p = bm_no_exit_prob(1, b, 2);
    CHECK(p > prev);
    prev = p;
  }
  prev = 1;
  for (double T = 0.5; T < 200; T *= 1.5) {
    const double p = bm_no_exit_prob(1, 1, T);
    CHECK(p < prev);
    prev = p;
  }
  prev = 1;
  for (double T = 0.5; T < 200; T *= 1.5) {
    const double p = bm_line_no_hit_prob(1, 0.05, 1, T).probability;
    CHECK(p < prev);
    prev = p;
  }
}

TEST_CASE("corr values") {
  CHECK(corr(CorrModel::limit(), 0) == doctest::Approx(1.0));
  for (int n = 1; n <= 10; ++n) CHECK(corr(CorrModel::liouville(n), 0) == doctest::Approx(1.0).epsilon(1e-10));
  const double c1 = 1.5 * std::exp(-0.5) - 0.5 * std::exp(-1.5);
  CHECK(corr(CorrModel::liouville(1), 1) == doctest::Approx(c1).epsilon(1e-10));
  CHECK(c1 == doctest::Approx(0.79823).epsilon(1e-5));
  CHECK(corr(CorrModel::limit(), 1) == doctest::Approx(0.88681).epsilon(1e-5));
  CHECK(corr(CorrModel::liouville(0), 1.3) == doctest::Approx(std::exp(-0.65)));
}

TEST_CASE("corr agrees with the closed form and a plain quadrature") {
  for (int n : {1, 2, 5, 20})
    for (double tau : {0.01, 0.5, 2.0, 7.0}) {
      const double c = corr(CorrModel::liouville(n), tau);
      CHECK(c == doctest::Approx(corr_liouville_closed_form(n, tau)).epsilon(1e-9));
      CHECK(c == doctest::Approx(corr_by_quadrature(n, tau)).epsilon(1e-8));
    }
  for (double a : {0.3, 1.5})
    CHECK(corr(CorrModel::liouville(a), 0.8) == doctest::Approx(corr_by_quadrature(a, 0.8)).epsilon(1e-8));
  CHECK(corr_is_extrapolated(CorrModel::liouville(1.5)));
  CHECK_FALSE(corr_is_extrapolated(CorrModel::liouville(2)));
  CHECK_FALSE(corr_is_extrapolated(CorrModel::limit()));
}

TEST_CASE("corr is nonincreasing on [0, 20]") {
  for (const auto& m : {CorrModel::limit(), CorrModel::liouville(0), CorrModel::liouville(1), CorrModel::liouville(3),
                        CorrModel::liouville(0.5)}) {
    CAPTURE(m.name());
    double prev = 2;
    bool ok = true;
    for (int i = 0; i <= 2000; ++i) {
      const double c = corr(m, 0.01 * i);
      ok = ok && c <= prev + 1e-14;
      prev = c;
    }
    CHECK(ok);
  }
}

TEST_CASE("a priori bounds") {
  CHECK(apriori_bound(SkorokhodBound{1, 1, 1}) == doctest::Approx(std::sqrt(2 / std::numbers::pi)));
  CHECK(apriori_bound(SkorokhodBound{1, 1, 1}) == doctest::Approx(0.79788).epsilon(1e-5));
  CHECK(apriori_bound(PolynomialBound{1, 16, 1}) == doctest::Approx(1.0 / 64));
  // the bound is the first term of erf(b / sqrt(2t)) and is sharp as b / sqrt(t) -> 0
  for (double t : {1e2, 1e4, 1e6}) {
    const double ratio = bm_no_exit_prob(1, 1, t) / apriori_bound(SkorokhodBound{1, 1, t});
    CHECK(ratio <= 1.0);
    CHECK(ratio >= 1 - 1.0 / (6 * t) - 1e-12);
  }
}

TEST_CASE("cameron-martin bracket") {
  const Bracket zero = cameron_martin_bracket(0.3, 0);
  CHECK(zero.lower == 1.0);
  CHECK(zero.upper == 1.0);
  const Bracket b = cameron_martin_bracket(0.5, 1);
  const double s = std::sqrt(2 * std::log(2.0));
  CHECK(b.lower == doctest::Approx(std::exp(-s - 0.5)));
  CHECK(b.upper == doctest::Approx(std::exp(s - 0.5)));
  CHECK(b.lower == doctest::Approx(0.1868).epsilon(1e-3));
  CHECK(b.upper == doctest::Approx(1.9688).epsilon(1e-3));
  // one-dimensional shift of a half-line
  const Bracket h = cameron_martin_bracket(0.5, 0.5);
  const double shifted = normal_cdf(-0.5);
  CHECK(shifted == doctest::Approx(0.3085).epsilon(1e-3));
  CHECK(shifted >= 0.5 * h.lower);
  CHECK(shifted <= 0.5 * h.upper);
  CHECK(h.lower == doctest::Approx(0.4898).epsilon(1e-3));
  CHECK(h.upper == doctest::Approx(1.5900).epsilon(1e-3));
  // lower * upper = e^{-|f|^2}
  RngStream rng(44, 0);
  for (int i = 0; i < 100; ++i) {
    const double p0 = 0.01 + 0.98 * rng.uniform(), f = 3 * rng.uniform();
    const Bracket r = cameron_martin_bracket(p0, f);
    CHECK(r.lower * r.upper == doctest::Approx(std::exp(-f * f)).epsilon(1e-12));
  }
  CHECK_THROWS(cameron_martin_bracket(0, 1));
  CHECK(cameron_martin_bracket(1.0, 0.7).lower == doctest::Approx(std::exp(-0.245)));
}

TEST_CASE("the upper factor needs |f|^2 < 2 log(1/p0)") {
  CHECK(cameron_martin_bracket(0.5, 1).upper_proven);
  CHECK(cameron_martin_bracket(0.5, 0.5).upper_proven);
  // half-line S = (-inf, 0.5] shifted inward by 1.4
  const double p0 = normal_cdf(0.5), ratio = normal_cdf(1.9) / p0;
  const Bracket b = cameron_martin_bracket(p0, 1.4);
  CHECK_FALSE(b.upper_proven);
  CHECK(ratio > b.upper);  // the formula alone fails here
  CHECK(ratio <= b.proven_upper(p0));
  CHECK(ratio >= b.lower);
  // inside the proven range the formula holds for every half-line
  for (double c = -2; c <= 2; c += 0.25)
    for (double f = -3; f <= 3; f += 0.125) {
      const double q = normal_cdf(c);
      const Bracket r = cameron_martin_bracket(q, std::abs(f));
      const double shifted = normal_cdf(c - f) / q;
      CHECK(shifted >= r.lower * (1 - 1e-12));
      if (r.upper_proven) CHECK(shifted <= r.upper * (1 + 1e-12));
    }
}

TEST_CASE("reference values") {
  CHECK(reference_theta(1) == 0.25);
  CHECK(reference_theta(0) == 0.5);
  CHECK_THROWS_AS(reference_theta(0.5), UnknownValueError);
  CHECK(reference_fbm_exponent(0.9) == doctest::Approx(0.1));
  CHECK(reference_lower_tail_exponent(0.25, 1.5) == doctest::Approx(1.0 / 6));
  CHECK(reference_b_bracket() == std::pair{0.4, 1.0});
}

TEST_CASE("power product integral") {
  CHECK(power_product_integral(0, 2, 3) == 1.0);
  CHECK(power_product_integral(1, 2, 3) == doctest::Approx(2.0 / 2 + 3.0 / 3));
  CHECK(power_product_integral(2, 0, 1) == doctest::Approx(0.2));
  const double ref = integrate<double>([](double v) { return std::pow(v, 0.7) * std::pow(0.4 + 1.3 * v, 0.7); }, 0.0,
                                       1.0, 1e-12);
  CHECK(power_product_integral(0.7, 0.4, 1.3) == doctest::Approx(ref).epsilon(1e-8));
}

}
