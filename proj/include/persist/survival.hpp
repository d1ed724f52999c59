#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "persist/kernels.hpp"
#include "persist/paths.hpp"

namespace persist {

/*!
 * Barrier F(t) for the event sup_t A_t <= F(t).
 *
 * constant(c): c. line(c, T0): c - t / sqrt(T0). power_drift(c, g):
 * 1 - c t^g, the event W_t + c t^g <= 1. late_zero(t1): no constraint on
 * [0, t1), zero afterwards.
 */
struct BarrierSpec {
  enum class Kind { constant, line, power_drift, late_zero };
  Kind kind = Kind::constant;
  double c = 1.0;
  double T0 = 1.0;
  double gamma = 0.0;
  double t1 = 1.0;

  static BarrierSpec constant(double c) { return {Kind::constant, c, 1.0, 0.0, 1.0}; }
  static BarrierSpec line(double c, double T0);
  static BarrierSpec power_drift(double c, double gamma);
  static BarrierSpec late_zero(double t1);

  /// Barrier value; +infinity where the barrier imposes nothing.
  double operator()(double t) const;
  std::string name() const;
};

enum class JMode { integers, grid };
std::string to_string(JMode mode);

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

inline constexpr double kZ95 = 1.959963984540054;

Interval wilson_interval(std::int64_t successes, std::int64_t n, double z = kZ95);

struct SurvivalEstimate {
  double T = 0.0;
  JMode j_mode = JMode::integers;
  std::int64_t n_trials = 0;
  std::int64_t n_survived = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::uint64_t master_seed = 0;
  std::uint64_t stream_seed = 0;  // seed the trial streams were derived from
  double grid_step = 1.0;

  /// Binomial standard error sqrt(p (1-p) / n).
  double standard_error() const;
  static SurvivalEstimate from_counts(double T, JMode mode, std::int64_t n, std::int64_t survived,
                                      std::uint64_t master_seed, std::uint64_t stream_seed, double step);
};

/// Everything that defines the survival event except the horizon.
struct SurvivalSetup {
  ProcessSpec process = ProcessSpec::walk(IncrementLaw::rademacher());
  std::optional<KernelSpec> functional;  // empty: identity
  BarrierSpec barrier = BarrierSpec::constant(1.0);
  JMode j_mode = JMode::integers;
  double grid_step = 1.0;  // grid mode only
  std::int64_t n_trials = 10'000;
  std::uint64_t master_seed = 0;
};

/// Evaluation times in [0, T]: integers 0..floor(T), or multiples of h.
std::vector<double> evaluation_times(JMode mode, double h, double T);

/*!
 * Per-trial simulation of A = I(X) for one setup on the evaluation times up
 * to a maximal horizon.
 *
 * The process/functional pair is reduced first: brownian(s) with
 * fractional(a) is s R^a, riemann_liouville(a) with fractional(b) is
 * R^{a+b}, ibm_pair(s) with fractional(b) is s R^{1+b}. Integer orders use
 * the exact Markov stepper, other orders a dense factor of the grid
 * covariance, fBm and stationary models circulant embedding. Walk paths are
 * integrated with the convention A_n = S_1 + ... + S_n and linear
 * interpolation between integers.
 *
 * A kernel on fbm or stationary_gp, or a table kernel on ibm_pair or
 * riemann_liouville, is a ConfigError.
 */
class SurvivalSimulator {
 public:
  SurvivalSimulator(const SurvivalSetup& setup, double T_max);
  ~SurvivalSimulator();
  SurvivalSimulator(SurvivalSimulator&&) noexcept;
  SurvivalSimulator& operator=(SurvivalSimulator&&) noexcept;

  const std::vector<double>& eval_times() const { return times_; }
  double step() const { return step_; }
  double T_max() const { return T_max_; }
  /// Name of the sampling strategy chosen for the setup.
  std::string strategy() const;

  /// Smallest evaluation time t <= horizon with A_t > F(t), or +infinity.
  double first_exit_time(RngStream& rng, double horizon) const;
  /// The full path of A on the evaluation times up to horizon.
  Eigen::VectorXd sample_path(RngStream& rng, double horizon) const;

  class Strategy;

 private:
  std::vector<double> times_;
  Eigen::VectorXd barrier_;
  double step_ = 1.0;
  double T_max_ = 0.0;
  std::unique_ptr<const Strategy> strategy_;
};

inline constexpr double kSurvived = std::numeric_limits<double>::infinity();

/// One Monte Carlo estimate at horizon T; trial i uses derive_stream(seed, i).
SurvivalEstimate estimate_survival(const SurvivalSetup& setup, double T);

enum class StreamMode { independent, common };

/*!
 * Estimates on an increasing T-grid (at least 4 points).
 *
 * independent: point k uses stream seed mix_seed(master_seed, k).
 * common: one path per trial up to max T; the survival indicators are then
 * pathwise nonincreasing in T.
 */
std::vector<SurvivalEstimate> survival_curve(const SurvivalSetup& setup, std::span<const double> T_grid,
                                             StreamMode mode = StreamMode::independent);

/// Same as survival_curve with a prebuilt simulator (T_max >= max T).
std::vector<SurvivalEstimate> survival_curve(const SurvivalSetup& setup, const SurvivalSimulator& sim,
                                             std::span<const double> T_grid, StreamMode mode);

}  // namespace persist
