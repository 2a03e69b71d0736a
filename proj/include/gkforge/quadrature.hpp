#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "gkforge/errors.hpp"
#include "gkforge/jet.hpp"

namespace gkforge {

// Gauss-Legendre rule on [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached per order; thread-safe.
const GaussRule& gauss_legendre_unit(int n);

namespace detail {

inline double magnitude(double x) { return std::abs(x); }

template <int O>
double magnitude(const Jet<O>& x) {
  double m = std::abs(x.v);
  m = std::max(m, x.d.cwiseAbs().maxCoeff());
  if constexpr (O == 2) m = std::max(m, x.h.cwiseAbs().maxCoeff());
  return m;
}

inline double difference(double a, double b) { return std::abs(a - b); }

template <int O>
double difference(const Jet<O>& a, const Jet<O>& b) {
  return magnitude(a - b);
}

}  // namespace detail

struct PeriodicQuadratureOptions {
  int initial_nodes = 64;
  int max_nodes = 8192;
  double rel_tol = 1e-12;
  int max_adaptive_intervals = 4000;
};

// Adaptive Gauss-Kronrod (7/15) on [a, b]. T is double or a Jet.
template <class T, class F>
T adaptive_gauss_kronrod(const F& f, double a, double b, double abs_tol, int max_intervals = 4000) {
  static constexpr std::array<double, 8> xk = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr std::array<double, 8> wk = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr std::array<double, 4> wg = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  struct Piece {
    T kronrod;
    double error;
  };
  auto rule = [&](double lo, double hi) {
    const double c = 0.5 * (lo + hi);
    const double r = 0.5 * (hi - lo);
    const T fc = f(c);
    T kr = wk[7] * fc;
    T ga = wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
      const T s = f(c - r * xk[i]) + f(c + r * xk[i]);
      kr += wk[i] * s;
      if (i % 2 == 1) ga += wg[i / 2] * s;
    }
    kr *= r;
    ga *= r;
    return Piece{kr, detail::difference(kr, ga)};
  };

  // Global adaptivity: always bisect the interval with the largest error estimate.
  struct Interval {
    double lo, hi;
    Piece piece;
  };
  const auto worse = [](const Interval& x, const Interval& y) { return x.piece.error < y.piece.error; };
  std::vector<Interval> heap{{a, b, rule(a, b)}};
  double error = heap.front().piece.error;
  while (error > abs_tol && static_cast<int>(heap.size()) < max_intervals) {
    std::pop_heap(heap.begin(), heap.end(), worse);
    const Interval iv = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (iv.lo + iv.hi);
    Interval left{iv.lo, mid, rule(iv.lo, mid)};
    Interval right{mid, iv.hi, rule(mid, iv.hi)};
    error += left.piece.error + right.piece.error - iv.piece.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), worse);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), worse);
  }
  // Recompute the error sum to shed accumulated round-off from the running update.
  error = 0.0;
  T total(0.0);
  for (const Interval& iv : heap) {
    total += iv.piece.kronrod;
    error += iv.piece.error;
  }
  if (error > 100.0 * abs_tol) throw ConvergenceError("adaptive quadrature did not converge");
  return total;
}

// Integral over one period [0, 2pi) of a smooth periodic integrand.
// Trapezoid sums with node doubling; adaptive Gauss-Kronrod once max_nodes is reached.
template <class T, class F>
T periodic_integral(const F& f, const PeriodicQuadratureOptions& opt = {}) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  // The first comparison is between initial_nodes / 2 and initial_nodes.
  int n = opt.initial_nodes / 2;
  T sum(0.0);
  for (int i = 0; i < n; ++i) sum += f(two_pi * i / n);
  T estimate = sum * (two_pi / n);
  while (2 * n <= opt.max_nodes) {
    T odd(0.0);
    for (int i = 0; i < n; ++i) odd += f(two_pi * (2 * i + 1) / (2.0 * n));
    sum += odd;
    n *= 2;
    const T refined = sum * (two_pi / n);
    const double change = detail::difference(refined, estimate);
    estimate = refined;
    if (change <= opt.rel_tol * detail::magnitude(refined)) return estimate;
  }
  const double tol = opt.rel_tol * detail::magnitude(estimate);
  return adaptive_gauss_kronrod<T>(f, 0.0, two_pi, tol, opt.max_adaptive_intervals);
}

}  // namespace gkforge
