#pragma once

#include <Eigen/Dense>
#include <functional>
#include <random>
#include <type_traits>

namespace testing_support {

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(20240611);
  return engine;
}

inline double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

// Fourth-order central first derivative along coordinate i; f may return a scalar or a matrix.
template <class F, class V = Eigen::Vector3d>
auto fd1(const F& f, V x, int i, double h) {
  auto at = [&](double s) {
    V y = x;
    y[i] += s * h;
    return f(y);
  };
  using R = std::decay_t<decltype(at(0.0))>;
  return R((-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * h));
}

// Fourth-order central second derivative along coordinates i and j.
template <class F>
double fd2(const F& f, Eigen::Vector3d x, int i, int j, double h) {
  if (i == j) {
    auto at = [&](double s) {
      Eigen::Vector3d y = x;
      y[i] += s * h;
      return f(y);
    };
    return (-at(2) + 16 * at(1) - 30 * at(0) + 16 * at(-1) - at(-2)) / (12 * h * h);
  }
  auto g = [&](const Eigen::Vector3d& y) { return fd1(f, y, j, h); };
  return fd1(g, x, i, h);
}

}  // namespace testing_support
