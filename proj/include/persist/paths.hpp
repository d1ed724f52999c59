#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "persist/errors.hpp"
#include "persist/rng.hpp"

namespace persist {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Interp { step_left, linear, points };

std::string to_string(Interp interp);

/*!
 * A sampled trajectory: strictly increasing times (times[0] >= 0), equally
 * many finite values, and how to read the path between samples.
 *
 * step_left means the path is constant on [times[i], times[i+1]); the last
 * value is held up to times.back().
 */
struct PathGrid {
  Eigen::VectorXd times;
  Eigen::VectorXd values;
  Interp interp = Interp::points;

  static PathGrid make(Eigen::VectorXd times, Eigen::VectorXd values, Interp interp);

  Eigen::Index size() const { return times.size(); }
  double start() const { return times[0]; }
  double end() const { return times[times.size() - 1]; }

  /// Value at t inside [start, end]. Points-mode paths only answer at
  /// sample times.
  double at(double t) const;
};

/// Throws unless times are strictly increasing, nonnegative and finite.
void validate_grid(std::span<const double> times);

struct IncrementLaw {
  enum class Kind { rademacher, std_gaussian, centered_exponential, centered_poisson };
  Kind kind = Kind::rademacher;
  double rate = 1.0;  // exponential and Poisson only

  static IncrementLaw rademacher() { return {Kind::rademacher, 1.0}; }
  static IncrementLaw std_gaussian() { return {Kind::std_gaussian, 1.0}; }
  static IncrementLaw centered_exponential(double rate);
  static IncrementLaw centered_poisson(double rate);

  double variance() const;
  /// Closed form of E[exp(beta |X_1|)]; the class membership gate.
  double abs_exp_moment(double beta) const;
  double draw(RngStream& rng) const;
  /// Finite support and probabilities, when the law has one.
  bool finite_support() const { return kind == Kind::rademacher; }
  std::string name() const;
};

struct CorrModel {
  enum class Kind { liouville, limit };
  Kind kind = Kind::limit;
  double order = 0.0;  // liouville only

  static CorrModel limit() { return {Kind::limit, 0.0}; }
  static CorrModel liouville(double order);
  std::string name() const;
};

namespace process {
struct Walk {
  IncrementLaw law;
};
struct Brownian {
  double sigma = 1.0;
};
/// Brownian motion together with its running integral.
struct IbmPair {
  double sigma = 1.0;
};
struct RiemannLiouville {
  double alpha = 0.0;
};
struct Fbm {
  double hurst = 0.5;
};
struct StationaryGp {
  CorrModel corr;
};
}  // namespace process

using ProcessKind = std::variant<process::Walk, process::Brownian, process::IbmPair,
                                 process::RiemannLiouville, process::Fbm, process::StationaryGp>;

struct ProcessSpec {
  ProcessKind kind;

  static ProcessSpec walk(IncrementLaw law) { return {process::Walk{law}}; }
  static ProcessSpec brownian(double sigma = 1.0);
  static ProcessSpec ibm_pair(double sigma = 1.0);
  static ProcessSpec riemann_liouville(double alpha);
  static ProcessSpec fbm(double hurst);
  static ProcessSpec stationary_gp(CorrModel corr) { return {process::StationaryGp{corr}}; }

  bool is_gaussian() const { return !std::holds_alternative<process::Walk>(kind); }
  bool is_stationary() const { return std::holds_alternative<process::StationaryGp>(kind); }
  std::string name() const;
};

// ---------------------------------------------------------------------------
// Covariances
// ---------------------------------------------------------------------------

/// Cov(R^alpha_s, R^alpha_t) = int_0^{s^t} (s-u)^a (t-u)^a du / Gamma(a+1)^2.
double riemann_liouville_covariance(double alpha, double s, double t);
double fbm_covariance(double hurst, double s, double t);
/// Autocovariance of fractional Gaussian noise at integer lag k, unit step.
double fgn_autocovariance(double hurst, double lag);

/// Covariance of the process value at times s and t. For ibm_pair this is
/// the covariance of the integral component.
double covariance(const ProcessSpec& spec, double s, double t);
Eigen::MatrixXd covariance_matrix(const ProcessSpec& spec, std::span<const double> times);

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

PathGrid sample_walk(const IncrementLaw& law, std::int64_t n_steps, RngStream& rng);

/*!
 * Factor F with F F^T = cov. A lower-triangular Cholesky factor is used when
 * the matrix is numerically positive definite; otherwise a symmetric
 * eigendecomposition with eigenvalues below 1e-12 * max clipped to zero.
 */
class DenseGaussianFactor {
 public:
  explicit DenseGaussianFactor(const Eigen::MatrixXd& cov);

  Eigen::Index size() const { return factor_.rows(); }
  bool triangular() const { return triangular_; }
  int clipped_eigenvalues() const { return clipped_; }
  const RowMatrixXd& matrix() const { return factor_; }

  Eigen::VectorXd sample(RngStream& rng) const;

  /// Generates coordinates in order and stops at the first index where
  /// `stop(i, value)` is true. Returns that index, or -1.
  template <typename Stop>
  Eigen::Index first_stop(RngStream& rng, Eigen::VectorXd& z, Stop&& stop) const;

 private:
  RowMatrixXd factor_;
  bool triangular_ = true;
  int clipped_ = 0;
};

/// Exact sampler for a stationary sequence r(k h), k = 0..m-1, by circulant
/// embedding. The embedding is doubled until its spectrum is nonnegative
/// up to the clipping threshold.
class CirculantSampler {
 public:
  CirculantSampler(const std::function<double(Eigen::Index lag)>& autocov, Eigen::Index m);

  Eigen::Index size() const { return m_; }
  Eigen::Index embedding_size() const { return sqrt_eigs_.size(); }
  int clipped_eigenvalues() const { return clipped_; }
  Eigen::VectorXd sample(RngStream& rng) const;

 private:
  Eigen::Index m_;
  Eigen::VectorXd sqrt_eigs_;
  int clipped_ = 0;
};

/*!
 * Exact one-step transition of (W, I_1 W, ..., I_k W) on a step-h grid.
 * The state evolves as v <- Phi v + chol(Q) z with Phi_ij = h^(j-i)/(j-i)!
 * and Q_ij = sigma^2 h^(i+j+1) / ((i+j+1) i! j!).
 */
class IntegratedBrownianStepper {
 public:
  IntegratedBrownianStepper(int order, double sigma, double h);

  int order() const { return order_; }
  double step() const { return h_; }
  const Eigen::MatrixXd& transition() const { return transition_; }
  const Eigen::MatrixXd& noise_factor() const { return noise_factor_; }

  void reset() { state_.setZero(); }
  void set_state(const Eigen::VectorXd& state) { state_ = state; }
  const Eigen::VectorXd& state() const { return state_; }
  /// Advances one step and returns the top component I_k W.
  double advance(RngStream& rng);

 private:
  int order_;
  double h_;
  Eigen::MatrixXd transition_;
  Eigen::MatrixXd noise_factor_;
  Eigen::VectorXd state_;
  Eigen::VectorXd z_;
};

/*!
 * Exact Gaussian sampler for one process on a fixed grid. The factorization
 * is computed once; `sample` is safe to call concurrently.
 *
 * Stationary models and fBm on uniform grids use circulant embedding; other
 * grids use a dense factorization and are limited to 4096 points.
 */
class GaussianPathSampler {
 public:
  static constexpr Eigen::Index kMaxDensePoints = 4096;

  GaussianPathSampler(const ProcessSpec& spec, std::vector<double> grid);

  const std::vector<double>& grid() const { return grid_; }
  bool uses_circulant() const { return static_cast<bool>(circulant_); }
  const DenseGaussianFactor* dense_factor() const { return dense_.get(); }

  PathGrid sample(RngStream& rng) const;
  Eigen::VectorXd sample_values(RngStream& rng) const;

  /// First grid index whose value satisfies `stop(index, value)`, or -1.
  /// Values are produced lazily when the dense factor is triangular.
  Eigen::Index first_stop(RngStream& rng, const std::function<bool(Eigen::Index, double)>& stop) const;

 private:
  ProcessSpec spec_;
  std::vector<double> grid_;
  bool fbm_increments_ = false;          // circulant over fGn then cumulative sum
  bool leading_zero_ = false;            // grid[0] == 0 with a degenerate value there
  std::shared_ptr<const CirculantSampler> circulant_;
  std::shared_ptr<const DenseGaussianFactor> dense_;
};

PathGrid sample_gaussian(const ProcessSpec& spec, std::span<const double> grid, RngStream& rng);

/// Exact joint sample of (W, int_0^t W ds) on t_j = j h, j = 0..floor(T/h).
std::pair<PathGrid, PathGrid> sample_ibm_pair(double sigma, double T, double h, RngStream& rng);

/// Uniform grid 0, h, 2h, ... up to T (inclusive within rounding).
std::vector<double> uniform_grid(double T, double h, bool include_zero = true);

// ---------------------------------------------------------------------------

template <typename Stop>
Eigen::Index DenseGaussianFactor::first_stop(RngStream& rng, Eigen::VectorXd& z, Stop&& stop) const {
  const Eigen::Index n = size();
  z.resize(n);
  if (triangular_) {
    for (Eigen::Index i = 0; i < n; ++i) {
      z[i] = rng.normal();
      const double v = factor_.row(i).head(i + 1).dot(z.head(i + 1));
      if (stop(i, v)) return i;
    }
    return -1;
  }
  for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();
  const Eigen::VectorXd x = factor_ * z;
  for (Eigen::Index i = 0; i < n; ++i)
    if (stop(i, x[i])) return i;
  return -1;
}

}  // namespace persist
