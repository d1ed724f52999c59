#include "persist/randpoly.hpp"

#include <cmath>

#include "persist/parallel.hpp"

namespace persist {

IntPolynomial IntPolynomial::from_doubles(const std::vector<double>& c) {
  IntPolynomial p;
  p.coeffs.reserve(c.size());
  for (double v : c) {
    if (!std::isfinite(v)) throw DomainError("IntPolynomial: coefficients must be finite");
    p.coeffs.emplace_back(v);  // exact: every double is a dyadic rational
  }
  return p;
}

int IntPolynomial::degree() const {
  for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i)
    if (coeffs[static_cast<std::size_t>(i)] != 0) return i;
  return -1;
}

mpq_class IntPolynomial::leading() const {
  const int d = degree();
  return d < 0 ? mpq_class(0) : coeffs[static_cast<std::size_t>(d)];
}

mpq_class IntPolynomial::operator()(const mpq_class& x) const {
  mpq_class acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

namespace {

int zdegree(const ZPoly& p) {
  for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
    if (p[static_cast<std::size_t>(i)] != 0) return i;
  return -1;
}

void trim(ZPoly& p) { p.resize(static_cast<std::size_t>(zdegree(p) + 1)); }

/// Divides by the positive content in place.
void make_primitive(ZPoly& p) {
  mpz_class g = 0;
  for (const auto& c : p) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    if (g == 1) return;
  }
  if (g > 1)
    for (auto& c : p) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
}

ZPoly derivative(const ZPoly& p) {
  ZPoly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<unsigned long>(i));
  trim(d);
  return d;
}

/// prem(a, b) = lc(b)^{deg a - deg b + 1} a mod b.
ZPoly pseudo_remainder(ZPoly a, const ZPoly& b) {
  const int db = zdegree(b);
  const mpz_class& lb = b[static_cast<std::size_t>(db)];
  int da = zdegree(a);
  int e = da - db + 1;
  while (da >= db) {
    const mpz_class la = a[static_cast<std::size_t>(da)];
    for (auto& c : a) c *= lb;
    for (int i = 0; i <= db; ++i) a[static_cast<std::size_t>(da - db + i)] -= la * b[static_cast<std::size_t>(i)];
    --e;
    da = zdegree(a);
    a.resize(static_cast<std::size_t>(std::max(da + 1, 0)));
  }
  if (e > 0) {
    mpz_class f;
    mpz_pow_ui(f.get_mpz_t(), lb.get_mpz_t(), static_cast<unsigned long>(e));
    for (auto& c : a) c *= f;
  }
  return a;
}

/// Exact quotient a / b of integer polynomials known to divide (over Q);
/// returned as a positive multiple with integer coefficients.
ZPoly exact_quotient(const ZPoly& a, const ZPoly& b) {
  const int da = zdegree(a), db = zdegree(b);
  std::vector<mpq_class> r(a.begin(), a.end());
  std::vector<mpq_class> q(static_cast<std::size_t>(da - db + 1));
  const mpq_class lb(b[static_cast<std::size_t>(db)]);
  for (int k = da - db; k >= 0; --k) {
    const mpq_class c = r[static_cast<std::size_t>(k + db)] / lb;
    q[static_cast<std::size_t>(k)] = c;
    for (int i = 0; i <= db; ++i) r[static_cast<std::size_t>(k + i)] -= c * mpq_class(b[static_cast<std::size_t>(i)]);
  }
  return primitive_integer(IntPolynomial{std::move(q)});
}

int sign_at_infinity(const ZPoly& p, bool negative) {
  const int d = zdegree(p);
  if (d < 0) return 0;
  const int s = sgn(p[static_cast<std::size_t>(d)]);
  return (negative && d % 2 == 1) ? -s : s;
}

int sign_changes_at_infinity(const std::vector<ZPoly>& chain, bool negative) {
  int changes = 0, last = 0;
  for (const auto& p : chain) {
    const int s = sign_at_infinity(p, negative);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace

ZPoly primitive_integer(const IntPolynomial& p) {
  if (p.is_zero()) throw DomainError("primitive_integer: zero polynomial");
  mpz_class den = 1;
  for (const auto& c : p.coeffs) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
  ZPoly z;
  z.reserve(p.coeffs.size());
  for (const auto& c : p.coeffs) z.push_back(c.get_num() * (den / c.get_den()));
  trim(z);
  make_primitive(z);
  return z;
}

std::vector<ZPoly> sturm_chain(const ZPoly& p) {
  // Subresultant PRS r_{i+1} = prem(r_{i-1}, r_i) / beta_i with exact
  // divisions. Each r_i is c_i times the Sturm entry s_i; only the sign of
  // c_i is tracked, from s_{i+1} = -rem(s_{i-1}, s_i).
  std::vector<ZPoly> chain;
  ZPoly a = p;
  trim(a);
  if (a.empty()) throw DomainError("sturm_chain: zero polynomial");
  chain.push_back(a);
  ZPoly b = derivative(a);
  if (b.empty()) return chain;
  chain.push_back(b);

  int sign_a = 1, sign_b = 1;  // signs of c_{i-1}, c_i
  mpz_class psi = -1;
  int delta = zdegree(a) - zdegree(b);
  mpz_class beta = (delta + 1) % 2 == 0 ? 1 : -1;
  for (;;) {
    const mpz_class lb = b.back();
    ZPoly r = pseudo_remainder(a, b);
    if (r.empty()) break;
    for (auto& c : r) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), beta.get_mpz_t());
    // s_{k+1} = -prem / (lc(b)^{delta+1} c_a), and r = prem / beta
    const int lc_pow = (sgn(lb) < 0 && (delta + 1) % 2 == 1) ? -1 : 1;
    const int sign_r = -lc_pow * sign_a * sgn(beta);
    ZPoly entry = r;
    if (sign_r < 0)
      for (auto& c : entry) c = -c;
    chain.push_back(std::move(entry));

    // next beta and psi
    const int next_delta = zdegree(b) - zdegree(r);
    mpz_class neg_lb = -lb, num, den;
    mpz_pow_ui(num.get_mpz_t(), neg_lb.get_mpz_t(), static_cast<unsigned long>(delta));
    if (delta >= 1) {
      mpz_pow_ui(den.get_mpz_t(), psi.get_mpz_t(), static_cast<unsigned long>(delta - 1));
      mpz_divexact(psi.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    } else {
      psi = num * psi;
    }
    mpz_class psi_pow;
    mpz_pow_ui(psi_pow.get_mpz_t(), psi.get_mpz_t(), static_cast<unsigned long>(next_delta));
    beta = -lb * psi_pow;

    sign_a = sign_b;
    sign_b = sign_r;
    a = std::move(b);
    b = std::move(r);
    delta = next_delta;
  }
  return chain;
}

int real_root_count(const IntPolynomial& p) {
  if (p.is_zero()) throw DomainError("real_root_count: zero polynomial");
  ZPoly z = primitive_integer(p);
  if (zdegree(z) == 0) return 0;
  std::vector<ZPoly> chain = sturm_chain(z);
  if (zdegree(chain.back()) > 0) {
    // the last entry is gcd(p, p') up to a constant: pass to the square-free part
    z = exact_quotient(z, chain.back());
    chain = sturm_chain(z);
  }
  return sign_changes_at_infinity(chain, true) - sign_changes_at_infinity(chain, false);
}

int sign_at_dyadic(const ZPoly& p, const mpz_class& k, unsigned s) {
  // 2^{s deg} p(k / 2^s) = sum_i a_i k^i 2^{s (deg - i)}, by Horner
  const int d = zdegree(p);
  if (d < 0) return 0;
  mpz_class acc = p[static_cast<std::size_t>(d)];
  for (int i = d - 1; i >= 0; --i) {
    acc *= k;
    mpz_class term = p[static_cast<std::size_t>(i)];
    term <<= s * static_cast<unsigned>(d - i);
    acc += term;
  }
  return sgn(acc);
}

double RandpolyEstimate::standard_error() const {
  return n_trials > 0 ? std::sqrt(p_hat * (1 - p_hat) / static_cast<double>(n_trials)) : 0.0;
}

IntPolynomial random_polynomial(int n, std::uint64_t seed, std::uint64_t trial) {
  RngStream rng = derive_stream(seed, trial);
  std::vector<double> c(static_cast<std::size_t>(2 * n + 1));
  for (auto& v : c) v = rng.normal();
  while (c.back() == 0.0) c.back() = rng.normal();
  return IntPolynomial::from_doubles(c);
}

namespace {

/// Probe points k / 64 in [-4, 4] plus +-8, +-16, +-64; real zeros of
/// random polynomials concentrate near +-1, 0 and infinity.
const std::vector<std::pair<long, unsigned>>& probe_points() {
  static const std::vector<std::pair<long, unsigned>> points = [] {
    std::vector<std::pair<long, unsigned>> v;
    for (long k = -256; k <= 256; k += 4) v.emplace_back(k, 6u);
    for (long k : {-4096L, -1024L, -512L, 512L, 1024L, 4096L}) v.emplace_back(k, 6u);
    return v;
  }();
  return points;
}

/// True when a sign opposite to the leading coefficient is found exactly.
bool prescreen_has_root(const std::vector<double>& c, const ZPoly& z) {
  const int lead = sgn(z.back());
  for (const auto& [k, s] : probe_points()) {
    const double x = std::ldexp(static_cast<double>(k), -static_cast<int>(s));
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
    if (v * lead < 0 && sign_at_dyadic(z, mpz_class(k), s) * lead < 0) return true;
  }
  return false;
}

}  // namespace

RandpolyEstimate estimate_nonpositive_prob(int n, std::int64_t trials, std::uint64_t seed) {
  if (n < 0) throw DomainError("estimate_nonpositive_prob: n must be >= 0");
  if (2 * n > 200) throw DomainError("estimate_nonpositive_prob: degree 2n is capped at 200");
  if (trials < 1) throw DomainError("estimate_nonpositive_prob: trials must be >= 1");

  struct Counts {
    std::int64_t event = 0, none = 0, mirror = 0, sturm = 0;
  };
  std::vector<Counts> counts(static_cast<std::size_t>(batch_count(trials)));
  for_each_batch(trials, [&](std::int64_t b, std::int64_t begin, std::int64_t end) {
    Counts c;
    for (std::int64_t i = begin; i < end; ++i) {
      const IntPolynomial p = random_polynomial(n, seed, static_cast<std::uint64_t>(i));
      const ZPoly z = primitive_integer(p);
      std::vector<double> dc(p.coeffs.size());
      for (std::size_t j = 0; j < dc.size(); ++j) dc[j] = p.coeffs[j].get_d();
      bool no_root;
      if (n == 0) {
        no_root = true;
      } else if (prescreen_has_root(dc, z)) {
        no_root = false;
      } else {
        ++c.sturm;
        no_root = real_root_count(p) == 0;
      }
      if (no_root) {
        ++c.none;
        if (z.back() < 0) ++c.event;
        else ++c.mirror;
      }
    }
    counts[static_cast<std::size_t>(b)] = c;
  });

  RandpolyEstimate e;
  e.n = n;
  e.n_trials = trials;
  e.master_seed = seed;
  for (const auto& c : counts) {
    e.n_event += c.event;
    e.n_no_real_zero += c.none;
    e.n_mirror += c.mirror;
    e.n_sturm += c.sturm;
  }
  const double nt = static_cast<double>(trials);
  e.p_hat = static_cast<double>(e.n_event) / nt;
  const Interval ci = wilson_interval(e.n_event, trials);
  e.ci_low = ci.low;
  e.ci_high = ci.high;
  const double q = static_cast<double>(e.n_no_real_zero) / nt;
  e.p_symmetric = q / 2;
  e.p_symmetric_stderr = std::sqrt(q * (1 - q) / nt) / 2;
  return e;
}

}  // namespace persist
