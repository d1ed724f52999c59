#include "persist/properties.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "persist/oracles.hpp"

namespace persist {

FiniteLaw FiniteLaw::rademacher() { return {{-1, 1}, {mpq_class(1, 2), mpq_class(1, 2)}}; }

FiniteLaw FiniteLaw::uniform_three() {
  return {{-1, 0, 1}, {mpq_class(1, 3), mpq_class(1, 3), mpq_class(1, 3)}};
}

std::string FiniteLaw::name() const {
  std::ostringstream os;
  os << "finite{";
  for (std::size_t i = 0; i < values.size(); ++i) os << (i ? "," : "") << values[i] << ":" << probs[i];
  os << "}";
  return os.str();
}

MonotoneFn MonotoneFn::from_terms(Direction dir, int n, std::vector<Term> terms) {
  std::ostringstream os;
  os << (dir == Direction::increasing ? "+" : "-") << "(";
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const auto& t = terms[j];
    if (t.coord < 0 || t.coord >= n) throw DomainError("MonotoneFn: term coordinate out of range");
    if (t.weight < 0) throw DomainError("MonotoneFn: term weights must be nonnegative");
    os << (j ? " + " : "") << t.weight << (t.kind == Term::Kind::ramp ? "*ramp(" : "*step(")
       << (t.on_position ? "x" : "d") << t.coord + 1 << " - " << t.knot << ")";
  }
  os << ")";
  const int sign = dir == Direction::increasing ? 1 : -1;
  auto g = [terms = std::move(terms), sign](const std::vector<mpq_class>& d) {
    mpq_class sum = 0;
    for (const auto& t : terms) {
      mpq_class u = 0;
      if (t.on_position) {
        for (int i = 0; i <= t.coord; ++i) u += d[static_cast<std::size_t>(i)];
      } else {
        u = d[static_cast<std::size_t>(t.coord)];
      }
      if (t.kind == Term::Kind::ramp) {
        if (u > t.knot) sum += t.weight * (u - t.knot);
      } else if (u >= t.knot) {
        sum += t.weight;
      }
    }
    return sign > 0 ? sum : mpq_class(-sum);
  };
  return custom(dir, n, std::move(g), os.str());
}

MonotoneFn MonotoneFn::custom(Direction dir, int n, std::function<mpq_class(const std::vector<mpq_class>&)> g,
                              std::string description) {
  if (n < 1) throw DomainError("MonotoneFn: arity must be >= 1");
  MonotoneFn f;
  f.dir_ = dir;
  f.n_ = n;
  f.g_ = std::move(g);
  f.description_ = std::move(description);
  return f;
}

mpq_class MonotoneFn::operator()(const std::vector<mpq_class>& d) const { return g_(d); }

MonotoneFn random_monotone(RngStream& rng, int n, Direction dir) {
  const int count = 1 + static_cast<int>(rng.next_u64() % 4);
  std::vector<MonotoneFn::Term> terms;
  for (int j = 0; j < count; ++j) {
    MonotoneFn::Term t;
    t.kind = rng.next_u64() % 2 ? MonotoneFn::Term::Kind::ramp : MonotoneFn::Term::Kind::step;
    t.coord = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
    t.on_position = rng.next_u64() % 2;
    t.weight = 1 + static_cast<long>(rng.next_u64() % 4);
    const long span = 2L * (t.on_position ? t.coord + 1 : 1);
    t.knot = mpq_class(static_cast<long>(rng.next_u64() % static_cast<std::uint64_t>(2 * span + 1)) - span, 2);
    t.knot.canonicalize();
    terms.push_back(std::move(t));
  }
  return MonotoneFn::from_terms(dir, n, std::move(terms));
}

namespace {

/// Calls visit(index tuple, increments) for every point of support^n.
template <typename Visit>
void for_each_lattice_point(const FiniteLaw& law, int n, Visit&& visit) {
  const auto m = law.values.size();
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  std::vector<mpq_class> d(static_cast<std::size_t>(n), law.values[0]);
  for (;;) {
    visit(idx, d);
    int i = n - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] + 1 == m) {
      idx[static_cast<std::size_t>(i)] = 0;
      d[static_cast<std::size_t>(i)] = law.values[0];
      --i;
    }
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    d[static_cast<std::size_t>(i)] = law.values[idx[static_cast<std::size_t>(i)]];
  }
}

void validate_law(const FiniteLaw& law) {
  if (law.values.empty() || law.values.size() != law.probs.size()) throw DomainError("FiniteLaw: malformed support");
  mpq_class total = 0;
  for (std::size_t i = 0; i < law.values.size(); ++i) {
    if (law.probs[i] < 0) throw DomainError("FiniteLaw: negative probability");
    if (i > 0 && !(law.values[i] > law.values[i - 1])) throw DomainError("FiniteLaw: support must be increasing");
    total += law.probs[i];
  }
  if (total != 1) throw DomainError("FiniteLaw: probabilities must sum to 1");
}

}  // namespace

bool audit(const MonotoneFn& f, const FiniteLaw& law) {
  validate_law(law);
  const int n = f.arity();
  const auto m = law.values.size();
  bool ok = true;
  for_each_lattice_point(law, n, [&](const std::vector<std::size_t>& idx, const std::vector<mpq_class>& d) {
    if (!ok) return;
    const mpq_class here = f(d);
    std::vector<mpq_class> up = d;
    for (int i = 0; i < n && ok; ++i) {
      if (idx[static_cast<std::size_t>(i)] + 1 == m) continue;
      up[static_cast<std::size_t>(i)] = law.values[idx[static_cast<std::size_t>(i)] + 1];
      const mpq_class there = f(up);
      ok = f.direction() == Direction::increasing ? there >= here : there <= here;
      up[static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(i)];
    }
  });
  return ok;
}

FkgReport fkg_check(const FiniteLaw& law, int n, const MonotoneFn& f, const MonotoneFn& g) {
  validate_law(law);
  if (f.direction() != g.direction()) throw DomainError("fkg_check: f and g must share a direction");
  if (n < 1 || n > 12) throw DomainError("fkg_check: n must lie in 1..12");
  if (f.arity() != n || g.arity() != n) throw DomainError("fkg_check: function arity differs from n");
  mpq_class ef = 0, eg = 0, efg = 0;
  for_each_lattice_point(law, n, [&](const std::vector<std::size_t>& idx, const std::vector<mpq_class>& d) {
    mpq_class w = 1;
    for (auto i : idx) w *= law.probs[i];
    const mpq_class fv = f(d), gv = g(d);
    ef += w * fv;
    eg += w * gv;
    efg += w * fv * gv;
  });
  FkgReport r;
  r.lhs = efg;
  r.rhs = ef * eg;
  r.holds = r.lhs >= r.rhs;
  return r;
}

FkgSuiteReport fkg_suite(const FiniteLaw& law, int n_max, int pairs, std::uint64_t seed) {
  FkgSuiteReport report;
  for (int k = 0; k < pairs; ++k) {
    RngStream rng = derive_stream(seed, static_cast<std::uint64_t>(k));
    const int n = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n_max));
    const Direction dir = rng.next_u64() % 2 ? Direction::increasing : Direction::decreasing;
    const MonotoneFn f = random_monotone(rng, n, dir);
    const MonotoneFn g = random_monotone(rng, n, dir);
    ++report.pairs;
    if (!audit(f, law) || !audit(g, law)) {
      ++report.audit_failures;
      continue;
    }
    if (!fkg_check(law, n, f, g).holds) ++report.violations;
  }
  return report;
}

// ---------------------------------------------------------------------------

SandwichReport sandwich_check(const PathGrid& walk, double T, double level) {
  if (walk.interp != Interp::step_left) throw DomainError("sandwich_check: walk must be a step path");
  if (!(T >= 0)) throw DomainError("sandwich_check: T must be >= 0");
  const auto upper = static_cast<Eigen::Index>(std::ceil(T));
  if (walk.size() < upper + 1) throw DomainError("sandwich_check: walk shorter than ceil(T)");
  for (Eigen::Index k = 0; k <= upper; ++k)
    if (walk.times[k] != static_cast<double>(k)) throw DomainError("sandwich_check: walk must live on 0, 1, 2, ...");

  // A_k at integers and the running maxima
  Eigen::VectorXd a(upper + 1);
  a[0] = 0.0;
  for (Eigen::Index k = 1; k <= upper; ++k) a[k] = a[k - 1] + walk.values[k];
  const auto lower = static_cast<Eigen::Index>(std::floor(T));
  const double sup_floor = a.head(lower + 1).maxCoeff();
  const double sup_ceil = a.maxCoeff();
  double a_T = a[lower];
  if (T > static_cast<double>(lower)) a_T += (T - static_cast<double>(lower)) * walk.values[lower + 1];
  const double sup_cont = std::max(sup_floor, a_T);  // linear pieces peak at their ends

  SandwichReport r;
  r.ceil_integers = sup_ceil <= level;
  r.continuous = sup_cont <= level;
  r.floor_integers = sup_floor <= level;
  r.holds = (!r.ceil_integers || r.continuous) && (!r.continuous || r.floor_integers);
  return r;
}

// ---------------------------------------------------------------------------

std::vector<double> semigroup_check(double alpha, double beta, const PathGrid& x, const std::vector<double>& h_list,
                                    InnerDiscretization inner) {
  if (alpha < 0 || beta < 0) throw DomainError("semigroup_check: orders must be >= 0");
  if (x.interp != Interp::step_left) throw DomainError("semigroup_check: path must be a step path");
  if (h_list.empty()) return {};
  if (alpha == 0 || beta == 0) return std::vector<double>(h_list.size(), 0.0);

  const double start = x.start();
  const double length = x.end() - start;
  const double h_max = *std::max_element(h_list.begin(), h_list.end());
  std::vector<double> eval = uniform_grid(length, h_max, false);
  for (auto& t : eval) t += start;
  if (eval.empty()) throw DomainError("semigroup_check: path shorter than the coarsest step");

  const PathGrid reference = convolve(KernelSpec::fractional(alpha + beta), x, eval);
  const KernelSpec outer = KernelSpec::fractional(alpha);
  const KernelSpec inner_kernel = KernelSpec::fractional(beta);

  std::vector<double> errors;
  for (double h : h_list) {
    std::vector<double> grid = uniform_grid(length, h, true);
    for (auto& t : grid) t += start;
    PathGrid y = convolve(inner_kernel, x, grid);
    y.interp = inner == InnerDiscretization::step ? Interp::step_left : Interp::linear;
    // evaluation points of the coarse grid, snapped to this grid
    std::vector<double> at;
    for (double t : eval) {
      const auto j = static_cast<std::size_t>(std::llround((t - start) / h));
      at.push_back(grid[std::min(j, grid.size() - 1)]);
    }
    const PathGrid composed = convolve(outer, y, at);
    errors.push_back((composed.values - reference.values).cwiseAbs().maxCoeff());
  }
  return errors;
}

// ---------------------------------------------------------------------------

SlepianReport slepian_corr_check(int n_max, double tau_max, double step) {
  if (n_max < 1 || n_max > 50) throw DomainError("slepian_corr_check: n_max must lie in 1..50");
  if (!(step > 0) || !(tau_max >= 0)) throw DomainError("slepian_corr_check: need step > 0 and tau_max >= 0");
  const auto points = static_cast<int>(std::floor(tau_max / step + 1e-9));
  SlepianReport r;
  for (int n = 1; n <= n_max; ++n) {
    const CorrModel model = CorrModel::liouville(n);
    double min_gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= points; ++k) {
      const double tau = k * step;
      const double cn = corr(model, tau);
      const double gap = corr(CorrModel::limit(), tau) - cn;
      r.max_closed_form_error = std::max(r.max_closed_form_error, std::abs(cn - corr_liouville_closed_form(n, tau)));
      r.max_violation = std::max(r.max_violation, -gap);
      if (k == 0) {
        r.max_gap_at_zero = std::max(r.max_gap_at_zero, std::abs(gap));
      } else {
        min_gap = std::min(min_gap, gap);
        if (gap <= 1e-9) ++r.zero_gap_points;
      }
    }
    r.min_gap.push_back(min_gap);
    r.gap_at_one.push_back(corr(CorrModel::limit(), 1.0) - corr(model, 1.0));
  }
  return r;
}

// ---------------------------------------------------------------------------

DriftCase drift_bracket_case(const Eigen::MatrixXd& cov, const Eigen::VectorXd& f, const Eigen::VectorXd& c,
                             std::int64_t trials, RngStream& rng) {
  const Eigen::Index d = cov.rows();
  if (cov.cols() != d || f.size() != d || c.size() != d) throw DomainError("drift_bracket_case: dimension mismatch");
  if (trials < 1) throw DomainError("drift_bracket_case: trials must be >= 1");
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw FactorizationError("drift_bracket_case: covariance is singular", 0.0);
  const Eigen::MatrixXd L = llt.matrixL();

  std::int64_t n0 = 0, n1 = 0, n01 = 0;
  Eigen::VectorXd z(d);
  for (std::int64_t t = 0; t < trials; ++t) {
    for (Eigen::Index i = 0; i < d; ++i) z[i] = rng.normal();
    const Eigen::VectorXd x = L * z;
    const bool in0 = (x.array() <= c.array()).all();
    const bool in1 = ((x + f).array() <= c.array()).all();
    n0 += in0;
    n1 += in1;
    n01 += in0 && in1;
  }
  DriftCase out;
  out.dim = static_cast<int>(d);
  out.cm_norm = std::sqrt(std::max(0.0, f.dot(llt.solve(f))));
  const double m = static_cast<double>(trials);
  const double p0 = n0 / m, p1 = n1 / m, p01 = n01 / m;
  out.p0 = p0;
  if (n0 == 0) return out;
  out.ratio = p1 / p0;
  const double var = (p1 * (1 - p1) + out.ratio * out.ratio * p0 * (1 - p0) - 2 * out.ratio * (p01 - p0 * p1)) /
                     (p0 * p0 * m);
  out.ratio_stderr = std::sqrt(std::max(0.0, var));
  const Bracket b = cameron_martin_bracket(p0, out.cm_norm);
  out.lower = b.lower;
  out.upper = b.proven_upper(p0);
  out.violation = out.ratio + 3 * out.ratio_stderr < out.lower || out.ratio - 3 * out.ratio_stderr > out.upper;
  return out;
}

DriftReport drift_bracket_check(int dim, int n_cases, std::int64_t mc_trials, std::uint64_t seed) {
  if (dim < 1 || dim > 64) throw DomainError("drift_bracket_check: dim must lie in 1..64");
  constexpr std::int64_t kPilot = 4000;
  DriftReport report;
  report.cases = n_cases;
  report.budget = static_cast<int>(std::floor(0.003 * n_cases));
  for (int k = 0; k < n_cases; ++k) {
    const std::uint64_t case_seed = mix_seed(seed, static_cast<std::uint64_t>(k));
    RngStream rng(case_seed, 0);
    const int d = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(dim));
    Eigen::MatrixXd a(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
    const Eigen::MatrixXd cov = a * a.transpose() / d + 0.25 * Eigen::MatrixXd::Identity(d, d);
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      ++report.skipped;
      continue;
    }
    const Eigen::MatrixXd L = llt.matrixL();
    Eigen::VectorXd u(d);
    for (int i = 0; i < d; ++i) u[i] = rng.normal();
    u.normalize();
    const Eigen::VectorXd f = 1.5 * rng.uniform() * (L * u);

    // calibrate a common standardized level so that P(X <= c) is near target
    const double target = 0.05 + 0.75 * rng.uniform();
    const Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
    std::vector<double> maxima(static_cast<std::size_t>(kPilot));
    Eigen::VectorXd z(d);
    for (auto& m : maxima) {
      for (int i = 0; i < d; ++i) z[i] = rng.normal();
      m = ((L * z).array() / sd.array()).maxCoeff();
    }
    const auto q = static_cast<std::size_t>(std::clamp(target * kPilot, 0.0, kPilot - 1.0));
    std::nth_element(maxima.begin(), maxima.begin() + static_cast<std::ptrdiff_t>(q), maxima.end());
    const Eigen::VectorXd c = maxima[q] * sd;

    RngStream mc(case_seed, 1);
    DriftCase dc;
    try {
      dc = drift_bracket_case(cov, f, c, mc_trials, mc);
    } catch (const FactorizationError&) {
      ++report.skipped;
      continue;
    }
    dc.seed = case_seed;
    if (dc.p0 == 0) {
      ++report.skipped;
      continue;
    }
    if (dc.violation) {
      ++report.violations;
      report.failing.push_back(dc);
    }
  }
  return report;
}

}  // namespace persist
