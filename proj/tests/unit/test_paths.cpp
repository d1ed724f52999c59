#include <doctest.h>

#include <cmath>
#include <numbers>

#include "persist/numerics.hpp"
#include "persist/paths.hpp"

using namespace persist;

namespace {

// Var of R^a_t by direct integration: int_0^t (t-u)^{2a} du / Gamma(a+1)^2.
double rl_variance(double a, double t) {
  return std::pow(t, 2 * a + 1) / ((2 * a + 1) * std::pow(std::tgamma(a + 1), 2));
}

struct Moments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  Eigen::MatrixXd cov_se;  // standard error of each entry
};

template <typename Draw>
Moments sample_moments(int n, int dim, Draw&& draw) {
  Eigen::MatrixXd x(n, dim);
  for (int i = 0; i < n; ++i) x.row(i) = draw(i).transpose();
  Moments m;
  m.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd c = x.rowwise() - m.mean.transpose();
  m.cov = c.transpose() * c / (n - 1);
  m.cov_se.resize(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      const Eigen::ArrayXd prod = c.col(a).array() * c.col(b).array();
      const double v = (prod - prod.mean()).square().sum() / (n - 1);
      m.cov_se(a, b) = std::sqrt(v / n);
    }
  return m;
}

}  // namespace

TEST_SUITE("paths") {

TEST_CASE("grid validation") {
  const std::vector<double> ok{0, 0.5, 1}, dup{0, 1, 1}, neg{-1, 0}, empty;
  CHECK_NOTHROW(validate_grid(ok));
  CHECK_THROWS_AS(validate_grid(dup), DomainError);
  CHECK_THROWS_AS(validate_grid(neg), DomainError);
  CHECK_THROWS(validate_grid(empty));
  CHECK_THROWS(validate_grid(std::vector<double>{0, NAN}));
}

TEST_CASE("PathGrid reads step and linear paths") {
  Eigen::VectorXd t(3), v(3);
  t << 0, 1, 2;
  v << 0, 1, 3;
  const PathGrid step = PathGrid::make(t, v, Interp::step_left);
  CHECK(step.at(0.5) == 0.0);
  CHECK(step.at(1.0) == 1.0);
  CHECK(step.at(2.0) == 3.0);
  const PathGrid lin = PathGrid::make(t, v, Interp::linear);
  CHECK(lin.at(1.5) == doctest::Approx(2.0));
  CHECK_THROWS(PathGrid::make(t, Eigen::VectorXd::Zero(2), Interp::linear));
}

TEST_CASE("rademacher walk support") {
  RngStream rng(1, 0);
  const PathGrid w = sample_walk(IncrementLaw::rademacher(), 3, rng);
  REQUIRE(w.size() == 4);
  CHECK(w.values[0] == 0.0);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(w.values[i + 1] - w.values[i]) == 1.0);
    CHECK(std::abs(w.values[i + 1]) <= 3.0);
  }
  CHECK_THROWS_AS(sample_walk(IncrementLaw::rademacher(), 0, rng), DegeneratePathError);
}

TEST_CASE("walk endpoint CLT") {
  const int n_steps = 5, trials = 1'000'000;
  for (const auto& law : {IncrementLaw::rademacher(), IncrementLaw::std_gaussian(),
                          IncrementLaw::centered_exponential(1.0), IncrementLaw::centered_poisson(2.0)}) {
    CAPTURE(law.name());
    double sum = 0;
    for (int i = 0; i < trials; ++i) {
      RngStream rng = derive_stream(3, static_cast<std::uint64_t>(i));
      double s = 0;
      for (int k = 0; k < n_steps; ++k) s += law.draw(rng);
      sum += s / std::sqrt(n_steps);
    }
    const double sigma = std::sqrt(law.variance());
    CHECK(std::abs(sum / trials) < 3 * sigma / 1e3);
  }
}

TEST_CASE("centered exponential increments are E - 1/rate") {
  RngStream a(5, 0), b(5, 0);
  const auto law = IncrementLaw::centered_exponential(2.0);
  double mean = 0;
  const int n = 200'000;
  for (int i = 0; i < n; ++i) {
    const double x = law.draw(a);
    CHECK(x == doctest::Approx(b.exponential() / 2.0 - 0.5));
    mean += x;
  }
  CHECK(std::abs(mean / n) < 4 * 0.5 / std::sqrt(n));
}

TEST_CASE("class gate: exponential moment finite and stable") {
  for (const auto& law : {IncrementLaw::rademacher(), IncrementLaw::std_gaussian(),
                          IncrementLaw::centered_exponential(1.0), IncrementLaw::centered_poisson(3.0)}) {
    CAPTURE(law.name());
    const double exact = law.abs_exp_moment(0.1);
    REQUIRE(std::isfinite(exact));
    const int n = 1'000'000;
    double first = 0, second = 0;
    RngStream rng(17, 0);
    for (int i = 0; i < n; ++i) (i < n / 2 ? first : second) += std::exp(0.1 * std::abs(law.draw(rng)));
    first /= n / 2;
    second /= n / 2;
    CHECK(first == doctest::Approx(exact).epsilon(2e-3));
    CHECK(second == doctest::Approx(exact).epsilon(2e-3));
  }
  CHECK_THROWS(IncrementLaw::centered_exponential(0.0));
  CHECK_THROWS(IncrementLaw::centered_poisson(-1.0));
}

TEST_CASE("covariance closed forms") {
  // brownian and RL(0) agree
  const std::vector<double> grid{0.5, 1, 2};
  const Eigen::MatrixXd a = covariance_matrix(ProcessSpec::brownian(1.0), grid);
  const Eigen::MatrixXd b = covariance_matrix(ProcessSpec::riemann_liouville(0.0), grid);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
  // RL(1) is integrated BM: Cov = s^2 t / 2 - s^3 / 6 for s <= t
  for (double s : {0.3, 1.0, 2.5})
    for (double t : {s, s + 0.7, 4.0}) {
      const double expect = s * s * t / 2 - s * s * s / 6;
      CHECK(riemann_liouville_covariance(1.0, s, t) == doctest::Approx(expect).epsilon(1e-10));
      CHECK(riemann_liouville_covariance(1.0, t, s) == doctest::Approx(expect).epsilon(1e-10));
    }
  // variances against the direct integral and an independent quadrature
  for (double alpha : {0.25, 0.5, 1.5, 2.0})
    for (double t : {0.5, 1.0, 3.0}) {
      const double g = std::tgamma(alpha + 1);
      const double quad = integrate<double>([&](double u) { return std::pow(t - u, 2 * alpha); }, 0.0, t) / (g * g);
      CHECK(riemann_liouville_covariance(alpha, t, t) == doctest::Approx(rl_variance(alpha, t)).epsilon(1e-9));
      CHECK(quad == doctest::Approx(rl_variance(alpha, t)).epsilon(1e-9));
    }
  CHECK(fbm_covariance(0.5, 1.0, 3.0) == doctest::Approx(1.0));
  CHECK(fbm_covariance(0.9, 2.0, 2.0) == doctest::Approx(std::pow(2.0, 1.8)));
  CHECK(fgn_autocovariance(0.5, 1) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("uniform-grid RL covariance matches the pointwise formula") {
  const double h = 0.25;
  std::vector<double> grid;
  for (int i = 1; i <= 40; ++i) grid.push_back(i * h);
  for (double alpha : {0.4, 1.3}) {
    const Eigen::MatrixXd m = covariance_matrix(ProcessSpec::riemann_liouville(alpha), grid);
    for (int i = 0; i < 40; i += 7)
      for (int j = 0; j < 40; j += 5)
        CHECK(m(i, j) == doctest::Approx(riemann_liouville_covariance(alpha, grid[i], grid[j])).epsilon(1e-12));
  }
}

TEST_CASE("brownian marginal") {
  const int n = 100'000;
  const std::vector<double> grid{1.0};
  double s2 = 0;
  for (int i = 0; i < n; ++i) {
    RngStream rng = derive_stream(21, static_cast<std::uint64_t>(i));
    const double x = sample_gaussian(ProcessSpec::brownian(1.0), grid, rng).values[0];
    s2 += x * x;
  }
  CHECK(std::abs(s2 / n - 1) < 3 * std::sqrt(2.0 / n));
}

TEST_CASE("RL marginal variance") {
  const int n = 100'000;
  for (double alpha : {0.5, 1.0, 1.7}) {
    const std::vector<double> grid{0.5, 1.0, 2.0};
    GaussianPathSampler sampler(ProcessSpec::riemann_liouville(alpha), grid);
    double s2 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
      RngStream rng = derive_stream(22, static_cast<std::uint64_t>(i));
      const double x = sampler.sample_values(rng)[2];
      s2 += x * x;
      s4 += x * x * x * x;
    }
    const double var = s2 / n, se = std::sqrt((s4 / n - var * var) / n);
    CHECK(std::abs(var - rl_variance(alpha, 2.0)) < 3 * se);
  }
}

TEST_CASE("covariance fidelity on 5-point grids") {
  const std::vector<double> grid{0.5, 1.0, 1.5, 2.0, 2.5};
  const int n = 100'000;
  for (const auto& spec : {ProcessSpec::brownian(1.3), ProcessSpec::riemann_liouville(0.5),
                           ProcessSpec::riemann_liouville(2.0), ProcessSpec::fbm(0.8), ProcessSpec::fbm(0.3)}) {
    CAPTURE(spec.name());
    GaussianPathSampler sampler(spec, grid);
    const Moments m = sample_moments(n, 5, [&](int i) {
      RngStream rng = derive_stream(23, static_cast<std::uint64_t>(i));
      return sampler.sample_values(rng);
    });
    const Eigen::MatrixXd exact = covariance_matrix(spec, grid);
    for (int a = 0; a < 5; ++a)
      for (int b = 0; b < 5; ++b) CHECK(std::abs(m.cov(a, b) - exact(a, b)) <= 4 * m.cov_se(a, b));
  }
}

TEST_CASE("stationary models by circulant embedding") {
  std::vector<double> grid;
  for (int i = 0; i < 5; ++i) grid.push_back(0.5 * i);
  const int n = 100'000;
  for (const auto& corr : {CorrModel::limit(), CorrModel::liouville(1.0)}) {
    CAPTURE(corr.name());
    const auto spec = ProcessSpec::stationary_gp(corr);
    GaussianPathSampler sampler(spec, grid);
    CHECK(sampler.uses_circulant());
    const Moments m = sample_moments(n, 5, [&](int i) {
      RngStream rng = derive_stream(24, static_cast<std::uint64_t>(i));
      return sampler.sample_values(rng);
    });
    const Eigen::MatrixXd exact = covariance_matrix(spec, grid);
    for (int a = 0; a < 5; ++a)
      for (int b = 0; b < 5; ++b) CHECK(std::abs(m.cov(a, b) - exact(a, b)) <= 4 * m.cov_se(a, b));
  }
}

TEST_CASE("ibm pair moments") {
  const int n = 100'000;
  double vw = 0, va = 0, cwa = 0;
  for (int i = 0; i < n; ++i) {
    RngStream rng = derive_stream(25, static_cast<std::uint64_t>(i));
    const auto [w, a] = sample_ibm_pair(1.0, 1.0, 0.125, rng);
    const double x = w.values[w.size() - 1], y = a.values[a.size() - 1];
    vw += x * x;
    va += y * y;
    cwa += x * y;
  }
  vw /= n;
  va /= n;
  cwa /= n;
  // Var A_1 = 1/3 with standard error sqrt(2/n) / 3
  CHECK(std::abs(va - 1.0 / 3) < 3 * std::sqrt(2.0 / n) / 3);
  const double r = cwa / std::sqrt(vw * va);
  // Fisher-z standard error for the correlation
  CHECK(std::abs(r - std::sqrt(3.0) / 2) < 3 * (1 - 0.75) / std::sqrt(n));
}

TEST_CASE("ibm pair one-step conditional mean") {
  // A_h - (h/2) W_h is independent of W_h when h = T
  const int n = 100'000;
  const double h = 2.0;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < n; ++i) {
    RngStream rng = derive_stream(26, static_cast<std::uint64_t>(i));
    const auto [w, a] = sample_ibm_pair(1.0, h, h, rng);
    REQUIRE(w.size() == 2);
    sxy += w.values[1] * a.values[1];
    sxx += w.values[1] * w.values[1];
  }
  const double slope = sxy / sxx;
  // residual variance h^3/12, so the slope stderr is sqrt(h^3/12 / (n h))
  CHECK(std::abs(slope - h / 2) < 4 * std::sqrt(h * h / 12 / n));
}

TEST_CASE("Markov stepper reproduces the integrated covariance") {
  const double h = 0.5;
  for (int order : {0, 1, 2}) {
    IntegratedBrownianStepper stepper(order, 1.0, h);
    const Eigen::MatrixXd& phi = stepper.transition();
    const Eigen::MatrixXd q = stepper.noise_factor() * stepper.noise_factor().transpose();
    // propagate the covariance four steps and compare with RL(order)
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(order + 1, order + 1);
    for (int k = 1; k <= 4; ++k) {
      p = phi * p * phi.transpose() + q;
      CHECK(p(order, order) == doctest::Approx(riemann_liouville_covariance(order, k * h, k * h)).epsilon(1e-12));
    }
  }
}

TEST_CASE("dense factor clips a singular covariance") {
  Eigen::MatrixXd cov(3, 3);
  cov << 1, 1, 0, 1, 1, 0, 0, 0, 2;
  DenseGaussianFactor f(cov);
  CHECK_FALSE(f.triangular());
  CHECK((f.matrix() * f.matrix().transpose() - cov).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("samplers are pure in the stream") {
  const std::vector<double> grid{0.25, 0.5, 0.75, 1.0};
  for (const auto& spec : {ProcessSpec::riemann_liouville(0.7), ProcessSpec::fbm(0.3)}) {
    RngStream a(9, 4), b(9, 4);
    const auto x = sample_gaussian(spec, grid, a), y = sample_gaussian(spec, grid, b);
    CHECK(x.values == y.values);
  }
}

TEST_CASE("dense grids are capped") {
  std::vector<double> grid;
  for (int i = 1; i <= 5000; ++i) grid.push_back(i);
  CHECK_THROWS_AS(GaussianPathSampler(ProcessSpec::riemann_liouville(0.3), grid), ConfigError);
}

TEST_CASE("uniform grid") {
  const auto g = uniform_grid(1.0, 0.25);
  CHECK(g == std::vector<double>{0, 0.25, 0.5, 0.75, 1.0});
  CHECK(uniform_grid(1.0, 0.25, false).size() == 4);
}

}
