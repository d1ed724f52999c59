#include "persist/paths.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>

#include "persist/numerics.hpp"
#include "persist/oracles.hpp"

namespace persist {

namespace {

constexpr double kClipRatio = 1e-12;

// Logged once per distinct message.
void warn_clipped(const char* where, int count, double ratio) {
  static std::mutex mu;
  static std::set<std::pair<std::string, int>> seen;
  std::lock_guard lock(mu);
  if (!seen.emplace(where, count).second) return;
  std::cerr << "persist: warning: " << where << " clipped " << count
            << " eigenvalue(s) below " << ratio << " * max\n";
}

bool nearly_uniform(std::span<const double> grid, double& h) {
  if (grid.size() < 2) return false;
  h = grid[1] - grid[0];
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double expected = grid[0] + h * static_cast<double>(i);
    if (std::abs(grid[i] - expected) > 1e-9 * std::max(1.0, std::abs(expected))) return false;
  }
  return true;
}

}  // namespace

std::string to_string(Interp interp) {
  switch (interp) {
    case Interp::step_left: return "step_left";
    case Interp::linear: return "linear";
    case Interp::points: return "points";
  }
  return "?";
}

void validate_grid(std::span<const double> times) {
  if (times.empty()) throw DegeneratePathError("grid is empty");
  if (!std::isfinite(times[0]) || times[0] < 0) throw DomainError("grid must start at a finite time >= 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!std::isfinite(times[i])) throw DomainError("grid contains a non-finite time");
    if (!(times[i] > times[i - 1])) throw DomainError("grid times must be strictly increasing (duplicates rejected)");
  }
}

PathGrid PathGrid::make(Eigen::VectorXd times, Eigen::VectorXd values, Interp interp) {
  if (times.size() != values.size()) throw DomainError("PathGrid: times and values differ in length");
  validate_grid(std::span<const double>(times.data(), static_cast<std::size_t>(times.size())));
  if (!values.allFinite()) throw DomainError("PathGrid: non-finite value");
  return PathGrid{std::move(times), std::move(values), interp};
}

double PathGrid::at(double t) const {
  const Eigen::Index n = size();
  if (t < start() || t > end()) throw DomainError("PathGrid::at: time outside the path support");
  const double* begin = times.data();
  const double* it = std::upper_bound(begin, begin + n, t);
  const Eigen::Index right = it - begin;  // first index with times > t
  const Eigen::Index left = right - 1;
  switch (interp) {
    case Interp::step_left: return values[left];
    case Interp::linear: {
      if (right >= n || times[left] == t) return values[left];
      const double w = (t - times[left]) / (times[right] - times[left]);
      return values[left] + w * (values[right] - values[left]);
    }
    case Interp::points:
      if (times[left] != t) throw DomainError("PathGrid::at: points-mode path queried between samples");
      return values[left];
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

IncrementLaw IncrementLaw::centered_exponential(double rate) {
  if (!(rate > 0) || !std::isfinite(rate)) throw DomainError("centered_exponential: rate must be positive");
  return {Kind::centered_exponential, rate};
}

IncrementLaw IncrementLaw::centered_poisson(double rate) {
  if (!(rate > 0) || !(rate <= 30)) throw DomainError("centered_poisson: rate must lie in (0, 30]");
  return {Kind::centered_poisson, rate};
}

double IncrementLaw::variance() const {
  switch (kind) {
    case Kind::rademacher:
    case Kind::std_gaussian: return 1.0;
    case Kind::centered_exponential: return 1.0 / (rate * rate);
    case Kind::centered_poisson: return rate;
  }
  return 0.0;
}

double IncrementLaw::abs_exp_moment(double beta) const {
  switch (kind) {
    case Kind::rademacher: return std::exp(beta);
    case Kind::std_gaussian: return 2.0 * std::exp(beta * beta / 2) * normal_cdf(beta);
    case Kind::centered_exponential: {
      // X = E - 1/rate with E ~ Exp(rate); split at E = 1/rate
      const double m = 1.0 / rate;
      if (beta >= rate) return INFINITY;
      const double below = rate * std::exp(beta * m) * (1 - std::exp(-(rate + beta) * m)) / (rate + beta);
      const double above = rate * std::exp(-beta * m) * std::exp(-(rate - beta) * m) / (rate - beta);
      return below + above;
    }
    case Kind::centered_poisson: {
      double total = 0.0, p = std::exp(-rate);
      for (int k = 0; k < 400; ++k) {
        if (k > 0) p *= rate / k;
        total += p * std::exp(beta * std::abs(k - rate));
      }
      return total;
    }
  }
  return 0.0;
}

double IncrementLaw::draw(RngStream& rng) const {
  switch (kind) {
    case Kind::rademacher: return rng.sign();
    case Kind::std_gaussian: return rng.normal();
    case Kind::centered_exponential: return (rng.exponential() - 1.0) / rate;
    case Kind::centered_poisson: {
      const double u = rng.uniform();
      double p = std::exp(-rate), cdf = p;
      int k = 0;
      while (u > cdf && k < 1000) {
        ++k;
        p *= rate / k;
        cdf += p;
      }
      return k - rate;
    }
  }
  return 0.0;
}

std::string IncrementLaw::name() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::rademacher: return "rademacher";
    case Kind::std_gaussian: return "std_gaussian";
    case Kind::centered_exponential: os << "centered_exponential(" << rate << ")"; return os.str();
    case Kind::centered_poisson: os << "centered_poisson(" << rate << ")"; return os.str();
  }
  return "?";
}

CorrModel CorrModel::liouville(double order) {
  if (!(order >= 0) || !std::isfinite(order)) throw DomainError("liouville order must be >= 0");
  return {Kind::liouville, order};
}

std::string CorrModel::name() const {
  if (kind == Kind::limit) return "limit";
  std::ostringstream os;
  os << "liouville(" << order << ")";
  return os.str();
}

ProcessSpec ProcessSpec::brownian(double sigma) {
  if (!(sigma > 0)) throw DomainError("brownian: sigma must be positive");
  return {process::Brownian{sigma}};
}

ProcessSpec ProcessSpec::ibm_pair(double sigma) {
  if (!(sigma > 0)) throw DomainError("ibm_pair: sigma must be positive");
  return {process::IbmPair{sigma}};
}

ProcessSpec ProcessSpec::riemann_liouville(double alpha) {
  if (!(alpha >= 0) || !std::isfinite(alpha)) throw DomainError("riemann_liouville: alpha must be >= 0");
  return {process::RiemannLiouville{alpha}};
}

ProcessSpec ProcessSpec::fbm(double hurst) {
  if (!(hurst > 0 && hurst < 1)) throw DomainError("fbm: H must lie in (0, 1)");
  return {process::Fbm{hurst}};
}

std::string ProcessSpec::name() const {
  std::ostringstream os;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, process::Walk>) os << "walk(" << p.law.name() << ")";
        else if constexpr (std::is_same_v<T, process::Brownian>) os << "brownian(" << p.sigma << ")";
        else if constexpr (std::is_same_v<T, process::IbmPair>) os << "ibm_pair(" << p.sigma << ")";
        else if constexpr (std::is_same_v<T, process::RiemannLiouville>) os << "riemann_liouville(" << p.alpha << ")";
        else if constexpr (std::is_same_v<T, process::Fbm>) os << "fbm(" << p.hurst << ")";
        else os << "stationary_gp(" << p.corr.name() << ")";
      },
      kind);
  return os.str();
}

// ---------------------------------------------------------------------------
// Covariances

double riemann_liouville_covariance(double alpha, double s, double t) {
  if (s < 0 || t < 0) throw DomainError("riemann_liouville_covariance: negative time");
  if (s > t) std::swap(s, t);
  if (s == 0) return 0.0;
  const double g = std::tgamma(alpha + 1);
  // int_0^s v^a (t - s + v)^a dv = s^{2a+1} int_0^1 w^a ((t-s)/s + w)^a dw
  const double integral = std::pow(s, 2 * alpha + 1) * power_product_integral(alpha, (t - s) / s, 1.0);
  return integral / (g * g);
}

double fbm_covariance(double hurst, double s, double t) {
  const double e = 2 * hurst;
  return 0.5 * (std::pow(s, e) + std::pow(t, e) - std::pow(std::abs(t - s), e));
}

double fgn_autocovariance(double hurst, double lag) {
  const double e = 2 * hurst;
  const double k = std::abs(lag);
  return 0.5 * (std::pow(k + 1, e) - 2 * std::pow(k, e) + std::pow(std::abs(k - 1), e));
}

double covariance(const ProcessSpec& spec, double s, double t) {
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, process::Walk>) {
          return p.law.variance() * std::floor(std::min(s, t));
        } else if constexpr (std::is_same_v<T, process::Brownian>) {
          return p.sigma * p.sigma * std::min(s, t);
        } else if constexpr (std::is_same_v<T, process::IbmPair>) {
          // Cov(int_0^s W, int_0^t W) = s^2 t / 2 - s^3 / 6 for s <= t
          const double a = std::min(s, t), b = std::max(s, t);
          return p.sigma * p.sigma * (a * a * b / 2 - a * a * a / 6);
        } else if constexpr (std::is_same_v<T, process::RiemannLiouville>) {
          return riemann_liouville_covariance(p.alpha, s, t);
        } else if constexpr (std::is_same_v<T, process::Fbm>) {
          return fbm_covariance(p.hurst, s, t);
        } else {
          return corr(p.corr, std::abs(t - s));
        }
      },
      spec.kind);
}

namespace {

/*!
 * Riemann-Liouville covariance on t_i = (i+1) h, i < n. With lag k = j - i,
 * G(i, k) = int_0^{i+1} v^a (k + v)^a dv (unit step) is accumulated over the
 * unit cells [m, m+1]: the first cell in closed form, the others, which are
 * smooth, by 16-point Gauss-Legendre with node powers shared across lags.
 */
Eigen::MatrixXd riemann_liouville_uniform(double alpha, double h, Eigen::Index n) {
  const auto& rule = gauss_legendre_cached<double>(16);
  const auto q = static_cast<Eigen::Index>(rule.nodes.size());
  Eigen::MatrixXd node_pow(q, n + 1);  // (s + x_q)^a for s = 0..n, x_q in [0, 1]
  for (Eigen::Index s = 0; s <= n; ++s)
    for (Eigen::Index r = 0; r < q; ++r)
      node_pow(r, s) = std::pow(static_cast<double>(s) + 0.5 * (rule.nodes[r] + 1), alpha);
  Eigen::VectorXd w(q);
  for (Eigen::Index r = 0; r < q; ++r) w[r] = 0.5 * rule.weights[r];

  const double g = std::tgamma(alpha + 1);
  const double scale = std::pow(h, 2 * alpha + 1) / (g * g);
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double acc = power_product_integral(alpha, static_cast<double>(k), 1.0);
    for (Eigen::Index i = 0; i + k < n; ++i) {
      if (i > 0) acc += (w.array() * node_pow.col(i).array() * node_pow.col(i + k).array()).sum();
      cov(i + k, i) = cov(i, i + k) = scale * acc;
    }
  }
  return cov;
}

}  // namespace

Eigen::MatrixXd covariance_matrix(const ProcessSpec& spec, std::span<const double> times) {
  const auto n = static_cast<Eigen::Index>(times.size());
  double h = 0.0;
  if (const auto* rl = std::get_if<process::RiemannLiouville>(&spec.kind);
      rl && rl->alpha > 0 && n >= 2 && nearly_uniform(times, h) && std::abs(times[0] - h) <= 1e-12 * h)
    return riemann_liouville_uniform(rl->alpha, h, n);
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j; i < n; ++i) {
      cov(i, j) = covariance(spec, times[i], times[j]);
      cov(j, i) = cov(i, j);
    }
  return cov;
}

// ---------------------------------------------------------------------------
// Samplers

PathGrid sample_walk(const IncrementLaw& law, std::int64_t n_steps, RngStream& rng) {
  if (n_steps < 1) throw DegeneratePathError("sample_walk: n_steps must be >= 1");
  Eigen::VectorXd times = Eigen::VectorXd::LinSpaced(n_steps + 1, 0.0, static_cast<double>(n_steps));
  Eigen::VectorXd values(n_steps + 1);
  values[0] = 0.0;
  for (std::int64_t i = 1; i <= n_steps; ++i) values[i] = values[i - 1] + law.draw(rng);
  return PathGrid{std::move(times), std::move(values), Interp::step_left};
}

DenseGaussianFactor::DenseGaussianFactor(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols()) throw DomainError("DenseGaussianFactor: covariance must be square");
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) {
    factor_ = llt.matrixL();
    triangular_ = true;
    return;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw FactorizationError("eigendecomposition did not converge", NAN);
  Eigen::VectorXd lambda = eig.eigenvalues();
  const double top = lambda.maxCoeff();
  const double threshold = kClipRatio * std::max(top, 0.0);
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] < -threshold) {
      std::ostringstream os;
      os << "covariance is not positive semidefinite: eigenvalue " << lambda[i] << " (max " << top << ")";
      throw FactorizationError(os.str(), lambda[i]);
    }
    if (lambda[i] < threshold) {
      if (lambda[i] != 0.0) ++clipped_;
      lambda[i] = 0.0;
    }
  }
  if (clipped_ > 0) warn_clipped("dense factorization", clipped_, kClipRatio);
  factor_ = eig.eigenvectors() * lambda.cwiseSqrt().asDiagonal();
  triangular_ = false;
}

Eigen::VectorXd DenseGaussianFactor::sample(RngStream& rng) const {
  Eigen::VectorXd z(size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  if (triangular_) return factor_.triangularView<Eigen::Lower>() * z;
  return factor_ * z;
}

CirculantSampler::CirculantSampler(const std::function<double(Eigen::Index)>& autocov, Eigen::Index m) : m_(m) {
  if (m < 1) throw DegeneratePathError("CirculantSampler: empty grid");
  Eigen::Index n = 2;
  while (n < 2 * (m - 1)) n *= 2;
  Eigen::FFT<double> fft;
  for (int attempt = 0; attempt < 6; ++attempt, n *= 2) {
    std::vector<std::complex<double>> row(static_cast<std::size_t>(n)), spectrum;
    for (Eigen::Index k = 0; k <= n / 2; ++k) {
      const double r = autocov(k);
      row[static_cast<std::size_t>(k)] = r;
      if (k > 0 && k < n / 2) row[static_cast<std::size_t>(n - k)] = r;
    }
    fft.fwd(spectrum, row);
    double top = 0.0, bottom = INFINITY;
    for (const auto& c : spectrum) {
      top = std::max(top, c.real());
      bottom = std::min(bottom, c.real());
    }
    const double threshold = kClipRatio * top;
    if (bottom < -threshold) {
      if (attempt == 5) {
        std::ostringstream os;
        os << "circulant embedding has negative eigenvalue " << bottom << " (max " << top << ")";
        throw FactorizationError(os.str(), bottom);
      }
      continue;
    }
    sqrt_eigs_.resize(n);
    clipped_ = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
      double lambda = spectrum[static_cast<std::size_t>(k)].real();
      if (lambda < threshold) {
        if (lambda != 0.0) ++clipped_;
        lambda = 0.0;
      }
      sqrt_eigs_[k] = std::sqrt(lambda / static_cast<double>(n));
    }
    if (clipped_ > 0) warn_clipped("circulant embedding", clipped_, kClipRatio);
    return;
  }
}

Eigen::VectorXd CirculantSampler::sample(RngStream& rng) const {
  const Eigen::Index n = sqrt_eigs_.size();
  thread_local Eigen::FFT<double> fft;
  thread_local std::vector<std::complex<double>> in, out;
  in.resize(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    const double re = rng.normal();
    const double im = rng.normal();
    in[static_cast<std::size_t>(k)] = std::complex<double>(re, im) * sqrt_eigs_[k];
  }
  fft.fwd(out, in);
  Eigen::VectorXd x(m_);
  for (Eigen::Index k = 0; k < m_; ++k) x[k] = out[static_cast<std::size_t>(k)].real();
  return x;
}

IntegratedBrownianStepper::IntegratedBrownianStepper(int order, double sigma, double h) : order_(order), h_(h) {
  if (order < 0) throw DomainError("IntegratedBrownianStepper: negative order");
  if (!(h > 0) || !(sigma > 0)) throw DomainError("IntegratedBrownianStepper: h and sigma must be positive");
  const int n = order + 1;
  transition_ = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd scale(n);
  double fact = 1.0;
  for (int j = 0; j < n; ++j) {
    if (j > 0) fact *= j;
    scale[j] = sigma * std::pow(h, j + 0.5) / fact;
  }
  for (int j = 0; j < n; ++j) {
    double coeff = 1.0;
    for (int i = j; i >= 0; --i) {
      transition_(j, i) = coeff;  // h^{j-i} / (j-i)!
      coeff *= h / (j - i + 1);
    }
  }
  // Q = D H D with H the Hilbert matrix 1/(i+j+1)
  Eigen::MatrixXd hilbert(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) hilbert(i, j) = 1.0 / (i + j + 1);
  Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(hilbert).matrixL();
  noise_factor_ = scale.asDiagonal() * chol;
  state_ = Eigen::VectorXd::Zero(n);
  z_.resize(n);
}

double IntegratedBrownianStepper::advance(RngStream& rng) {
  if (order_ == 0) {
    state_[0] += noise_factor_(0, 0) * rng.normal();
    return state_[0];
  }
  if (order_ == 1) {
    const double z0 = rng.normal(), z1 = rng.normal();
    const double w = state_[0];
    state_[0] = w + noise_factor_(0, 0) * z0;
    state_[1] += transition_(1, 0) * w + noise_factor_(1, 0) * z0 + noise_factor_(1, 1) * z1;
    return state_[1];
  }
  for (Eigen::Index i = 0; i < z_.size(); ++i) z_[i] = rng.normal();
  state_ = transition_ * state_ + noise_factor_.triangularView<Eigen::Lower>() * z_;
  return state_[order_];
}

// ---------------------------------------------------------------------------

GaussianPathSampler::GaussianPathSampler(const ProcessSpec& spec, std::vector<double> grid)
    : spec_(spec), grid_(std::move(grid)) {
  validate_grid(grid_);
  if (std::holds_alternative<process::Walk>(spec.kind))
    throw ConfigError("GaussianPathSampler: walks are not Gaussian processes");
  if (std::holds_alternative<process::IbmPair>(spec.kind))
    throw ConfigError("GaussianPathSampler: use sample_ibm_pair for the (W, A) pair");

  double h = 0.0;
  const bool uniform = nearly_uniform(grid_, h);
  const auto m = static_cast<Eigen::Index>(grid_.size());

  if (const auto* gp = std::get_if<process::StationaryGp>(&spec.kind); gp && uniform) {
    const CorrModel model = gp->corr;
    circulant_ = std::make_shared<CirculantSampler>(
        [&](Eigen::Index lag) { return corr(model, h * static_cast<double>(lag)); }, m);
    return;
  }
  if (const auto* f = std::get_if<process::Fbm>(&spec.kind);
      f && uniform && std::abs(grid_[0]) <= 1e-12 * h && m >= 2) {
    // B at 0, h, 2h, ...: cumulative sum of m - 1 fGn increments
    const double hurst = f->hurst;
    const double scale = std::pow(h, 2 * hurst);
    fbm_increments_ = true;
    leading_zero_ = true;
    circulant_ = std::make_shared<CirculantSampler>(
        [=](Eigen::Index lag) { return scale * fgn_autocovariance(hurst, static_cast<double>(lag)); }, m - 1);
    return;
  }

  std::span<const double> positive(grid_);
  if (!spec.is_stationary() && grid_[0] == 0.0) {
    leading_zero_ = true;
    positive = positive.subspan(1);
  }
  if (static_cast<Eigen::Index>(positive.size()) > kMaxDensePoints)
    throw ConfigError("GaussianPathSampler: dense factorization is limited to 4096 grid points");
  if (!positive.empty()) dense_ = std::make_shared<DenseGaussianFactor>(covariance_matrix(spec, positive));
}

Eigen::VectorXd GaussianPathSampler::sample_values(RngStream& rng) const {
  const auto m = static_cast<Eigen::Index>(grid_.size());
  Eigen::VectorXd values(m);
  if (circulant_) {
    const Eigen::VectorXd x = circulant_->sample(rng);
    if (fbm_increments_) {
      values[0] = 0.0;
      for (Eigen::Index i = 1; i < m; ++i) values[i] = values[i - 1] + x[i - 1];
    } else {
      values = x;
    }
    return values;
  }
  const Eigen::Index offset = leading_zero_ ? 1 : 0;
  if (leading_zero_) values[0] = 0.0;
  if (dense_) values.tail(m - offset) = dense_->sample(rng);
  return values;
}

PathGrid GaussianPathSampler::sample(RngStream& rng) const {
  Eigen::VectorXd times = Eigen::Map<const Eigen::VectorXd>(grid_.data(), static_cast<Eigen::Index>(grid_.size()));
  return PathGrid{std::move(times), sample_values(rng), Interp::linear};
}

Eigen::Index GaussianPathSampler::first_stop(RngStream& rng,
                                             const std::function<bool(Eigen::Index, double)>& stop) const {
  if (leading_zero_ && stop(0, 0.0)) return 0;
  if (dense_ && dense_->triangular()) {
    const Eigen::Index offset = leading_zero_ ? 1 : 0;
    thread_local Eigen::VectorXd z;
    return [&] {
      const Eigen::Index i = dense_->first_stop(rng, z, [&](Eigen::Index j, double v) { return stop(j + offset, v); });
      return i < 0 ? Eigen::Index(-1) : i + offset;
    }();
  }
  const Eigen::VectorXd values = sample_values(rng);
  for (Eigen::Index i = leading_zero_ ? 1 : 0; i < values.size(); ++i)
    if (stop(i, values[i])) return i;
  return -1;
}

PathGrid sample_gaussian(const ProcessSpec& spec, std::span<const double> grid, RngStream& rng) {
  if (std::holds_alternative<process::IbmPair>(spec.kind) || std::holds_alternative<process::Walk>(spec.kind))
    throw ConfigError("sample_gaussian: spec must be brownian, riemann_liouville, fbm or stationary_gp");
  return GaussianPathSampler(spec, std::vector<double>(grid.begin(), grid.end())).sample(rng);
}

std::pair<PathGrid, PathGrid> sample_ibm_pair(double sigma, double T, double h, RngStream& rng) {
  if (!(h > 0) || h > T) throw DomainError("sample_ibm_pair: need 0 < h <= T");
  const std::vector<double> grid = uniform_grid(T, h);
  const auto m = static_cast<Eigen::Index>(grid.size());
  IntegratedBrownianStepper stepper(1, sigma, h);
  Eigen::VectorXd w(m), a(m);
  w[0] = a[0] = 0.0;
  for (Eigen::Index j = 1; j < m; ++j) {
    stepper.advance(rng);
    w[j] = stepper.state()[0];
    a[j] = stepper.state()[1];
  }
  Eigen::VectorXd times = Eigen::Map<const Eigen::VectorXd>(grid.data(), m);
  return {PathGrid{times, std::move(w), Interp::linear}, PathGrid{times, std::move(a), Interp::linear}};
}

std::vector<double> uniform_grid(double T, double h, bool include_zero) {
  if (!(h > 0) || !(T >= 0)) throw DomainError("uniform_grid: need h > 0 and T >= 0");
  const auto steps = static_cast<std::int64_t>(std::floor(T / h + 1e-9));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(steps + 1));
  for (std::int64_t j = include_zero ? 0 : 1; j <= steps; ++j) grid.push_back(static_cast<double>(j) * h);
  return grid;
}

}  // namespace persist
