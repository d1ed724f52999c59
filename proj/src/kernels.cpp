#include "persist/kernels.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "persist/numerics.hpp"

namespace persist {

KernelSpec KernelSpec::fractional(double alpha) {
  if (!(alpha > 0) || !std::isfinite(alpha)) throw DomainError("fractional kernel: alpha must be positive");
  KernelSpec spec;
  spec.kind = Kind::fractional;
  spec.alpha = alpha;
  spec.bound = {1.0 / std::tgamma(alpha), alpha, alpha};
  return spec;
}

KernelSpec KernelSpec::table(Eigen::VectorXd s, Eigen::VectorXd k, KernelBound bound) {
  if (s.size() != k.size() || s.size() == 0) throw DomainError("table kernel: columns differ in length or are empty");
  if (!(bound.k > 0 && bound.alpha > 0 && bound.beta > 0 && bound.alpha >= bound.beta))
    throw DomainError("table kernel: bound needs k, alpha, beta > 0 and alpha >= beta");
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (!(s[i] > 0) || !std::isfinite(s[i])) throw DomainError("table kernel: sample points must be positive");
    if (i > 0 && !(s[i] > s[i - 1])) throw DomainError("table kernel: sample points must be strictly increasing");
    if (!(k[i] >= 0) || !std::isfinite(k[i])) throw DomainError("table kernel: values must be finite and >= 0");
  }
  KernelSpec spec;
  spec.kind = Kind::table;
  spec.table_s = std::move(s);
  spec.table_k = std::move(k);
  spec.bound = bound;
  return spec;
}

KernelSpec KernelSpec::load_csv(const std::string& path, KernelBound bound) {
  std::ifstream in(path);
  if (!in) throw ConfigError("table kernel: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("table kernel: missing header row in " + path);
  {
    // a header row must not parse as numbers
    std::istringstream hs(line);
    double probe;
    char comma;
    if (hs >> probe >> comma) throw ConfigError("table kernel: first row of " + path + " is not a header");
  }
  std::vector<double> s, k;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    double a, b;
    char comma;
    if (!(ls >> a >> comma >> b) || comma != ',')
      throw ConfigError("table kernel: malformed row " + std::to_string(row) + " in " + path);
    s.push_back(a);
    k.push_back(b);
  }
  return table(Eigen::Map<Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size())),
               Eigen::Map<Eigen::VectorXd>(k.data(), static_cast<Eigen::Index>(k.size())), bound);
}

std::string KernelSpec::name() const {
  std::ostringstream os;
  if (kind == Kind::fractional) os << "fractional(" << alpha << ")";
  else os << "table(" << table_s.size() << " points)";
  return os.str();
}

double kernel_eval(const KernelSpec& spec, double s) {
  if (!(s > 0)) throw DomainError("kernel_eval: s must be positive");
  double value;
  if (spec.kind == KernelSpec::Kind::fractional) {
    value = std::pow(s, spec.alpha - 1) / std::tgamma(spec.alpha);
  } else {
    const auto& xs = spec.table_s;
    const auto& ks = spec.table_k;
    const Eigen::Index n = xs.size();
    if (s <= xs[0]) {
      value = ks[0];
    } else if (s >= xs[n - 1]) {
      value = ks[n - 1];
    } else {
      const Eigen::Index r = std::upper_bound(xs.data(), xs.data() + n, s) - xs.data();
      const double w = (s - xs[r - 1]) / (xs[r] - xs[r - 1]);
      value = ks[r - 1] + w * (ks[r] - ks[r - 1]);
    }
  }
  const double env = spec.bound.envelope(s);
  if (value > env * (1 + 1e-12)) {
    std::ostringstream os;
    os << "kernel value " << value << " exceeds envelope " << env << " at s = " << s;
    throw ContractViolation(os.str());
  }
  return value;
}

PathGrid convolve(const KernelSpec& spec, const PathGrid& x, std::span<const double> eval_times) {
  if (x.interp == Interp::points) throw DomainError("convolve: path must be step_left or linear");
  const Eigen::Index n = x.size();
  const std::span<const double> grid(x.times.data(), static_cast<std::size_t>(n));
  Eigen::VectorXd out(static_cast<Eigen::Index>(eval_times.size()));
  Eigen::VectorXd times(out.size());

  for (std::size_t e = 0; e < eval_times.size(); ++e) {
    const double t = eval_times[e];
    if (t > x.end() * (1 + 1e-14)) throw DomainError("convolve: eval time exceeds path support");
    if (t < x.start()) throw DomainError("convolve: eval time precedes path start");
    times[static_cast<Eigen::Index>(e)] = t;
    double acc = 0.0;
    if (spec.is_fractional() && x.interp == Interp::step_left) {
      const Eigen::VectorXd w = frac_weights<double>(spec.alpha, grid, t);
      acc = w.dot(x.values);
    } else if (spec.is_fractional()) {
      const double a = spec.alpha;
      const double g = std::tgamma(a);
      for (Eigen::Index i = 0; i + 1 < n && x.times[i] < t; ++i) {
        const double lo = x.times[i];
        const double hi = std::min(x.times[i + 1], t);
        const double slope = (x.values[i + 1] - x.values[i]) / (x.times[i + 1] - x.times[i]);
        const double upper = t - lo, lower = t - hi;
        acc += ((x.values[i] + slope * upper) * pow_difference(upper, lower, a) / a -
                slope * pow_difference(upper, lower, a + 1) / (a + 1)) /
               g;
      }
    } else {
      for (Eigen::Index i = 0; i < n && x.times[i] < t; ++i) {
        const double lo = x.times[i];
        const double hi = (i + 1 < n) ? std::min(x.times[i + 1], t) : t;
        if (hi <= lo) continue;
        auto integrand = [&](double s) {
          double xs = x.values[i];
          if (x.interp == Interp::linear && i + 1 < n)
            xs += (x.values[i + 1] - x.values[i]) * (s - x.times[i]) / (x.times[i + 1] - x.times[i]);
          return kernel_eval(spec, t - s) * xs;
        };
        acc += gauss_legendre_panel<double>(integrand, lo, hi, 16);
      }
    }
    out[static_cast<Eigen::Index>(e)] = acc;
  }
  return PathGrid{std::move(times), std::move(out), Interp::points};
}

PathGrid lamperti(const PathGrid& x, double alpha, bool normalize) {
  if (!(alpha >= 0)) throw DomainError("lamperti: alpha must be >= 0");
  if (x.size() == 0 || x.start() < 1) throw DomainError("lamperti: input times must be >= 1");
  const double c = normalize ? std::tgamma(alpha + 1) * std::sqrt(2 * alpha + 1) : 1.0;
  Eigen::VectorXd u = x.times.array().log();
  Eigen::VectorXd y = c * (-(alpha + 0.5) * u.array()).exp() * x.values.array();
  return PathGrid{std::move(u), std::move(y), Interp::points};
}

}  // namespace persist
