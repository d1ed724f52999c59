#include "persist/survival.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "persist/parallel.hpp"

namespace persist {

BarrierSpec BarrierSpec::line(double c, double T0) {
  if (!(T0 > 0)) throw DomainError("line barrier: T0 must be positive");
  return {Kind::line, c, T0, 0.0, 1.0};
}

BarrierSpec BarrierSpec::power_drift(double c, double gamma) {
  if (!(gamma >= 0)) throw DomainError("power_drift barrier: gamma must be >= 0");
  return {Kind::power_drift, c, 1.0, gamma, 1.0};
}

BarrierSpec BarrierSpec::late_zero(double t1) {
  if (!(t1 > 0)) throw DomainError("late_zero barrier: t1 must be positive");
  return {Kind::late_zero, 0.0, 1.0, 0.0, t1};
}

double BarrierSpec::operator()(double t) const {
  switch (kind) {
    case Kind::constant: return c;
    case Kind::line: return c - t / std::sqrt(T0);
    case Kind::power_drift: return 1.0 - c * std::pow(t, gamma);
    case Kind::late_zero: return t < t1 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return c;
}

std::string BarrierSpec::name() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::constant: os << "constant(" << c << ")"; break;
    case Kind::line: os << "line(" << c << ", " << T0 << ")"; break;
    case Kind::power_drift: os << "power_drift(" << c << ", " << gamma << ")"; break;
    case Kind::late_zero: os << "late_zero(" << t1 << ")"; break;
  }
  return os.str();
}

std::string to_string(JMode mode) { return mode == JMode::integers ? "integers" : "grid"; }

Interval wilson_interval(std::int64_t successes, std::int64_t n, double z) {
  if (n <= 0) throw DomainError("wilson_interval: n must be positive");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1 + z2 / nn;
  const double centre = (p + z2 / (2 * nn)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
  return {std::max(0.0, std::min(p, centre - half)), std::min(1.0, std::max(p, centre + half))};
}

double SurvivalEstimate::standard_error() const {
  return n_trials > 0 ? std::sqrt(p_hat * (1 - p_hat) / static_cast<double>(n_trials)) : 0.0;
}

SurvivalEstimate SurvivalEstimate::from_counts(double T, JMode mode, std::int64_t n, std::int64_t survived,
                                               std::uint64_t master_seed, std::uint64_t stream_seed, double step) {
  if (survived < 0 || survived > n) throw ContractViolation("survival counts out of range");
  SurvivalEstimate e;
  e.T = T;
  e.j_mode = mode;
  e.n_trials = n;
  e.n_survived = survived;
  e.p_hat = static_cast<double>(survived) / static_cast<double>(n);
  const Interval ci = wilson_interval(survived, n);
  e.ci_low = ci.low;
  e.ci_high = ci.high;
  e.master_seed = master_seed;
  e.stream_seed = stream_seed;
  e.grid_step = step;
  return e;
}

std::vector<double> evaluation_times(JMode mode, double h, double T) {
  if (!(T >= 0)) throw DomainError("evaluation_times: T must be >= 0");
  if (mode == JMode::integers) return uniform_grid(T, 1.0);
  if (!(h > 0)) throw DomainError("evaluation_times: grid step must be positive");
  return uniform_grid(T, h);
}

// ---------------------------------------------------------------------------
// Strategies. run() produces A at evaluation indices 0..n_eval-1 in order and
// returns the first index with A > barrier, or -1. With a record buffer it
// stores every value and never stops early.

class SurvivalSimulator::Strategy {
 public:
  virtual ~Strategy() = default;
  virtual Eigen::Index run(RngStream& rng, Eigen::Index n_eval, const Eigen::VectorXd& bar, double* record) const = 0;
  virtual std::string name() const = 0;
};

namespace {

using Strategy = SurvivalSimulator::Strategy;

inline bool visit(Eigen::Index i, double v, const Eigen::VectorXd& bar, double* record) {
  if (record) {
    record[i] = v;
    return false;
  }
  return v > bar[i];
}

inline std::int64_t floor_index(double t) { return static_cast<std::int64_t>(std::floor(t + 1e-9)); }

/// X_t = S_floor(t).
class WalkPlain final : public Strategy {
 public:
  WalkPlain(IncrementLaw law, const std::vector<double>& times) : law_(law), times_(times) {}
  Eigen::Index run(RngStream& rng, Eigen::Index n_eval, const Eigen::VectorXd& bar, double* record) const override {
    std::int64_t k = 0;
    double s = 0.0;
    for (Eigen::Index i = 0; i < n_eval; ++i) {
      const std::int64_t m = floor_index(times_[static_cast<std::size_t>(i)]);
      for (; k < m; ++k) s += law_.draw(rng);
      if (visit(i, s, bar, record)) return i;
    }
    return -1;
  }
  std::string name() const override { return "walk"; }

 private:
  IncrementLaw law_;
  std::vector<double> times_;
};

/// A_n = S_1 + ... + S_n, linear in between.
class WalkIntegrated final : public Strategy {
 public:
  WalkIntegrated(IncrementLaw law, const std::vector<double>& times) : law_(law), times_(times) {}
  Eigen::Index run(RngStream& rng, Eigen::Index n_eval, const Eigen::VectorXd& bar, double* record) const override {
    thread_local std::vector<double> s, a;
    s.assign(1, 0.0);
    a.assign(1, 0.0);
    auto ensure = [&](std::int64_t j) {
      while (static_cast<std::int64_t>(s.size()) <= j) {
        s.push_back(s.back() + law_.draw(rng));
        a.push_back(a.back() + s.back());
      }
    };
    for (Eigen::Index i = 0; i < n_eval; ++i) {
      const double t = times_[static_cast<std::size_t>(i)];
      const std::int64_t m = floor_index(t);
      const double frac = std::max(0.0, t - static_cast<double>(m));
      double v;
      if (frac > 1e-9) {
        ensure(m + 1);
        v = a[static_cast<std::size_t>(m)] + frac * s[static_cast<std::size_t>(m + 1)];
      } else {
        ensure(m);
        v = a[static_cast<std::size_t>(m)];
      }
      if (visit(i, v, bar, record)) return i;
    }
    return -1;
  }
  std::string name() const override { return "walk_integrated"; }

 private:
  IncrementLaw law_;
  std::vector<double> times_;
};

/// General kernel on a walk: the step path (S_1, ..., S_N, S_N) on 0..N.
class WalkConvolved final : public Strategy {
 public:
  WalkConvolved(IncrementLaw law, KernelSpec kernel, const std::vector<double>& times)
      : law_(law), kernel_(std::move(kernel)), times_(times) {}
  Eigen::Index run(RngStream& rng, Eigen::Index n_eval, const Eigen::VectorXd& bar, double* record) const override {
    if (n_eval == 0) return -1;
    const std::int64_t n = std::max<std::int64_t>(1, static_cast<std::int64_t>(
                                                         std::ceil(times_[static_cast<std::size_t>(n_eval - 1)] - 1e-9)));
    PathGrid path;
    path.interp = Interp::step_left;
    path.times = Eigen::VectorXd::LinSpaced(n + 1, 0.0, static_cast<double>(n));
    path.values.resize(n + 1);
    double s = 0.0;
    for (std::int64_t j = 0; j < n; ++j) {
      s += law_.draw(rng);
      path.values[j] = s;
    }
    path.values[n] = s;
    for (Eigen::Index i = 0; i < n_eval; ++i) {
      const double t = times_[static_cast<std::size_t>(i)];
      const double v = t <= 0 ? 0.0 : convolve(kernel_, path, std::span<const double>(&t, 1)).values[0];
      if (visit(i, v, bar, record)) return i;
    }
    return -1;
  }
  std::string name() const override { return "walk_convolved"; }

 private:
  IncrementLaw law_;
  KernelSpec kernel_;
  std::vector<double> times_;
};

/// (W, I_1 W, ..., I_k W) stepped exactly on a uniform grid starting at 0.
class MarkovIntegrated final : public Strategy {
 public:
  MarkovIntegrated(int order, double sigma, double h) : proto_(order, sigma, h) {}
  Eigen::Index run(RngStream& rng, Eigen::Index n_eval, const Eigen::VectorXd& bar, double* record) const override {
    if (n_eval == 0) return -1;
    if (visit(0, 0.0, bar, record)) return 0;
    IntegratedBrownianStepper s = proto_;
    for (Eigen::Index i = 1; i < n_eval; ++i)
      if (visit(i, s.advance(rng), bar, record)) return i;
    return -1;
  }
  std::string name() const override { return "markov_order_" + std::to_string(proto_.order()); }

 private:
  IntegratedBrownianStepper proto_;
};

class GaussianGrid final : public Strategy {
 public:
  GaussianGrid(const ProcessSpec& spec, double scale, const std::vector<double>& times)
      : sampler_(spec, times), scale_(scale) {
    // Circulant samplers cost the full embedding per path. The first m
    // points of an exact sampler of a longer grid have the law of an exact
    // sampler of the first m points, so short horizons use short prefixes.
    if (sampler_.uses_circulant())
      for (std::size_t len = 1024; len < times.size(); len *= 2)
        prefixes_.emplace_back(spec, std::vector<double>(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(len)));
  }
  Eigen::Index run(RngStream& rng, Eigen::Index n_eval, const Eigen::VectorXd& bar, double* record) const override {
    const GaussianPathSampler* sampler = &sampler_;
    for (const auto& p : prefixes_)
      if (static_cast<Eigen::Index>(p.grid().size()) >= n_eval) {
        sampler = &p;
        break;
      }
    const Eigen::Index i = sampler->first_stop(rng, [&](Eigen::Index j, double v) {
      if (j >= n_eval) return true;
      return visit(j, scale_ * v, bar, record);
    });
    return i >= n_eval || i < 0 ? Eigen::Index(-1) : i;
  }
  std::string name() const override {
    return sampler_.uses_circulant() ? "circulant" : "dense";
  }

 private:
  GaussianPathSampler sampler_;
  std::vector<GaussianPathSampler> prefixes_;
  double scale_;
};

/// Table kernel on Brownian motion: the Brownian path is sampled exactly on
/// the grid, read linearly in between and convolved by quadrature.
class BrownianTable final : public Strategy {
 public:
  BrownianTable(double sigma, double h, KernelSpec kernel, const std::vector<double>& times)
      : proto_(0, sigma, h), kernel_(std::move(kernel)), times_(times) {}
  Eigen::Index run(RngStream& rng, Eigen::Index n_eval, const Eigen::VectorXd& bar, double* record) const override {
    if (n_eval == 0) return -1;
    IntegratedBrownianStepper s = proto_;
    PathGrid path;
    path.interp = Interp::linear;
    path.times = Eigen::Map<const Eigen::VectorXd>(times_.data(), std::max<Eigen::Index>(n_eval, 2));
    path.values.resize(path.times.size());
    path.values[0] = 0.0;
    for (Eigen::Index j = 1; j < path.values.size(); ++j) path.values[j] = s.advance(rng);
    for (Eigen::Index i = 0; i < n_eval; ++i) {
      const double t = times_[static_cast<std::size_t>(i)];
      const double v = t <= 0 ? 0.0 : convolve(kernel_, path, std::span<const double>(&t, 1)).values[0];
      if (visit(i, v, bar, record)) return i;
    }
    return -1;
  }
  std::string name() const override { return "brownian_table"; }

 private:
  IntegratedBrownianStepper proto_;
  KernelSpec kernel_;
  std::vector<double> times_;
};

bool is_integer(double x) { return std::abs(x - std::round(x)) < 1e-12; }

/// Riemann-Liouville of the given order scaled by sigma on a uniform grid.
std::unique_ptr<const Strategy> liouville(double order, double sigma, double h, const std::vector<double>& times) {
  if (is_integer(order)) return std::make_unique<MarkovIntegrated>(static_cast<int>(std::lround(order)), sigma, h);
  return std::make_unique<GaussianGrid>(ProcessSpec::riemann_liouville(order), sigma, times);
}

}  // namespace

SurvivalSimulator::SurvivalSimulator(const SurvivalSetup& setup, double T_max) : T_max_(T_max) {
  if (!(T_max > 0)) throw DomainError("survival: T must be positive");
  step_ = setup.j_mode == JMode::integers ? 1.0 : setup.grid_step;
  times_ = evaluation_times(setup.j_mode, step_, T_max);
  barrier_.resize(static_cast<Eigen::Index>(times_.size()));
  for (std::size_t i = 0; i < times_.size(); ++i) barrier_[static_cast<Eigen::Index>(i)] = setup.barrier(times_[i]);

  const auto& kernel = setup.functional;
  const bool fractional = kernel && kernel->is_fractional();
  const double h = step_;

  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, process::Walk>) {
          if (!kernel) strategy_ = std::make_unique<WalkPlain>(p.law, times_);
          else if (fractional && kernel->alpha == 1.0) strategy_ = std::make_unique<WalkIntegrated>(p.law, times_);
          else strategy_ = std::make_unique<WalkConvolved>(p.law, *kernel, times_);
        } else if constexpr (std::is_same_v<P, process::Brownian>) {
          if (!kernel) strategy_ = std::make_unique<MarkovIntegrated>(0, p.sigma, h);
          else if (fractional) strategy_ = liouville(kernel->alpha, p.sigma, h, times_);
          else strategy_ = std::make_unique<BrownianTable>(p.sigma, h, *kernel, times_);
        } else if constexpr (std::is_same_v<P, process::IbmPair>) {
          if (kernel && !fractional) throw ConfigError("a table kernel cannot be applied to ibm_pair");
          strategy_ = liouville(1.0 + (kernel ? kernel->alpha : 0.0), p.sigma, h, times_);
        } else if constexpr (std::is_same_v<P, process::RiemannLiouville>) {
          if (kernel && !fractional) throw ConfigError("a table kernel cannot be applied to riemann_liouville");
          strategy_ = liouville(p.alpha + (kernel ? kernel->alpha : 0.0), 1.0, h, times_);
        } else {
          if (kernel) throw ConfigError("a functional cannot be applied to " + setup.process.name());
          strategy_ = std::make_unique<GaussianGrid>(setup.process, 1.0, times_);
        }
      },
      setup.process.kind);
}

SurvivalSimulator::~SurvivalSimulator() = default;
SurvivalSimulator::SurvivalSimulator(SurvivalSimulator&&) noexcept = default;
SurvivalSimulator& SurvivalSimulator::operator=(SurvivalSimulator&&) noexcept = default;

std::string SurvivalSimulator::strategy() const { return strategy_->name(); }

namespace {
Eigen::Index count_upto(const std::vector<double>& times, double horizon) {
  return std::upper_bound(times.begin(), times.end(), horizon * (1 + 1e-12) + 1e-12) - times.begin();
}
}  // namespace

double SurvivalSimulator::first_exit_time(RngStream& rng, double horizon) const {
  const Eigen::Index n = count_upto(times_, std::min(horizon, T_max_));
  const Eigen::Index i = strategy_->run(rng, n, barrier_, nullptr);
  return i < 0 ? kSurvived : times_[static_cast<std::size_t>(i)];
}

Eigen::VectorXd SurvivalSimulator::sample_path(RngStream& rng, double horizon) const {
  const Eigen::Index n = count_upto(times_, std::min(horizon, T_max_));
  Eigen::VectorXd out(n);
  strategy_->run(rng, n, barrier_, out.data());
  return out;
}

namespace {

std::vector<SurvivalEstimate> curve_impl(const SurvivalSetup& setup, const SurvivalSimulator& sim,
                                         std::span<const double> T_grid, StreamMode mode, bool single) {
  if (setup.n_trials < 1) throw DomainError("survival: n_trials must be >= 1");
  for (std::size_t k = 0; k < T_grid.size(); ++k) {
    if (!(T_grid[k] > 0)) throw DomainError("survival: T must be positive");
    if (k > 0 && !(T_grid[k] > T_grid[k - 1])) throw DomainError("survival: T grid must be increasing");
  }
  if (T_grid.back() > sim.T_max() * (1 + 1e-12)) throw DomainError("survival: T exceeds the simulator horizon");

  const auto K = T_grid.size();
  const std::int64_t n = setup.n_trials;
  std::vector<SurvivalEstimate> out;
  out.reserve(K);

  if (mode == StreamMode::common) {
    const double t_max = T_grid.back();
    std::vector<std::vector<std::int64_t>> counts(static_cast<std::size_t>(batch_count(n)));
    for_each_batch(n, [&](std::int64_t b, std::int64_t begin, std::int64_t end) {
      std::vector<std::int64_t> c(K, 0);
      for (std::int64_t i = begin; i < end; ++i) {
        RngStream rng = derive_stream(setup.master_seed, static_cast<std::uint64_t>(i));
        const double exit = sim.first_exit_time(rng, t_max);
        for (std::size_t k = 0; k < K; ++k)
          if (exit > T_grid[k]) ++c[k];
      }
      counts[static_cast<std::size_t>(b)] = std::move(c);
    });
    std::vector<std::int64_t> total(K, 0);
    for (const auto& c : counts)
      for (std::size_t k = 0; k < K; ++k) total[k] += c[k];
    for (std::size_t k = 0; k < K; ++k)
      out.push_back(SurvivalEstimate::from_counts(T_grid[k], setup.j_mode, n, total[k], setup.master_seed,
                                                  setup.master_seed, sim.step()));
    return out;
  }

  for (std::size_t k = 0; k < K; ++k) {
    const std::uint64_t seed = single ? setup.master_seed : mix_seed(setup.master_seed, k);
    const double T = T_grid[k];
    std::vector<std::int64_t> counts(static_cast<std::size_t>(batch_count(n)), 0);
    for_each_batch(n, [&](std::int64_t b, std::int64_t begin, std::int64_t end) {
      std::int64_t c = 0;
      for (std::int64_t i = begin; i < end; ++i) {
        RngStream rng = derive_stream(seed, static_cast<std::uint64_t>(i));
        if (sim.first_exit_time(rng, T) > T) ++c;
      }
      counts[static_cast<std::size_t>(b)] = c;
    });
    std::int64_t total = 0;
    for (auto c : counts) total += c;
    out.push_back(SurvivalEstimate::from_counts(T, setup.j_mode, n, total, setup.master_seed, seed, sim.step()));
  }
  return out;
}

}  // namespace

SurvivalEstimate estimate_survival(const SurvivalSetup& setup, double T) {
  const SurvivalSimulator sim(setup, T);
  return curve_impl(setup, sim, std::span<const double>(&T, 1), StreamMode::independent, true).front();
}

std::vector<SurvivalEstimate> survival_curve(const SurvivalSetup& setup, const SurvivalSimulator& sim,
                                             std::span<const double> T_grid, StreamMode mode) {
  if (T_grid.size() < 4) throw DomainError("survival_curve: need at least 4 horizons");
  return curve_impl(setup, sim, T_grid, mode, false);
}

std::vector<SurvivalEstimate> survival_curve(const SurvivalSetup& setup, std::span<const double> T_grid,
                                             StreamMode mode) {
  if (T_grid.size() < 4) throw DomainError("survival_curve: need at least 4 horizons");
  const SurvivalSimulator sim(setup, T_grid.back());
  return curve_impl(setup, sim, T_grid, mode, false);
}

}  // namespace persist
