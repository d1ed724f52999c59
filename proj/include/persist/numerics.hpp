#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "persist/errors.hpp"

namespace persist {

/// Standard normal CDF through erfc, accurate in both tails.
template <typename Scalar>
Scalar normal_cdf(Scalar x) {
  return Scalar(0.5) * std::erfc(-x / std::numbers::sqrt2_v<Scalar>);
}

template <typename Scalar>
struct GaussLegendreRule {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes;    // on [-1, 1]
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;
};

/// n-point Gauss-Legendre rule by Newton iteration on P_n.
template <typename Scalar>
GaussLegendreRule<Scalar> gauss_legendre(int n) {
  GaussLegendreRule<Scalar> rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Scalar x = std::cos(std::numbers::pi_v<Scalar> * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
    Scalar dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      Scalar p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      const Scalar dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < Scalar(1e-16)) break;
    }
    // recompute derivative at the converged node
    Scalar p0 = 1, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1);
    const Scalar w = 2 / ((1 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

template <typename Scalar>
const GaussLegendreRule<Scalar>& gauss_legendre_cached(int n) {
  // only the orders used in this library; built on first use
  static const GaussLegendreRule<Scalar> r16 = gauss_legendre<Scalar>(16);
  static const GaussLegendreRule<Scalar> r20 = gauss_legendre<Scalar>(20);
  if (n == 16) return r16;
  if (n == 20) return r20;
  throw DomainError("gauss_legendre_cached: unsupported order");
}

template <typename Scalar, typename F>
Scalar gauss_legendre_panel(const F& f, Scalar a, Scalar b, int order = 20) {
  const auto& rule = gauss_legendre_cached<Scalar>(order);
  const Scalar mid = (a + b) / 2, half = (b - a) / 2;
  Scalar sum = 0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

namespace detail {
template <typename Scalar, typename F>
Scalar adaptive_gl(const F& f, Scalar a, Scalar b, Scalar whole, Scalar rel_tol, Scalar abs_floor, int depth) {
  const Scalar mid = (a + b) / 2;
  const Scalar left = gauss_legendre_panel<Scalar>(f, a, mid);
  const Scalar right = gauss_legendre_panel<Scalar>(f, mid, b);
  const Scalar both = left + right;
  if (depth <= 0 || std::abs(both - whole) <= std::max(rel_tol * std::abs(both), abs_floor)) return both;
  return adaptive_gl<Scalar>(f, a, mid, left, rel_tol, abs_floor / 2, depth - 1) +
         adaptive_gl<Scalar>(f, mid, b, right, rel_tol, abs_floor / 2, depth - 1);
}
}  // namespace detail

/// Adaptive Gauss-Legendre quadrature: a 20-point panel is accepted when it
/// agrees with the sum of its two halves to the relative tolerance.
template <typename Scalar, typename F>
Scalar integrate(const F& f, Scalar a, Scalar b, Scalar rel_tol = Scalar(1e-10), int max_depth = 40) {
  if (a == b) return 0;
  const Scalar whole = gauss_legendre_panel<Scalar>(f, a, b);
  const Scalar floor = std::abs(whole) * rel_tol * Scalar(1e-6) + std::numeric_limits<Scalar>::min();
  return detail::adaptive_gl<Scalar>(f, a, b, whole, rel_tol, floor, max_depth);
}

}  // namespace persist
