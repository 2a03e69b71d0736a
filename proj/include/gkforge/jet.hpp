#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace gkforge {

// Truncated Taylor expansion of a scalar function of three variables.
// Order 1 carries value and gradient, order 2 adds the Hessian.
template <int Order>
struct Jet {
  static_assert(Order == 1 || Order == 2, "Jet supports first and second order only");
  static constexpr int order = Order;

  double v = 0.0;
  Eigen::Vector3d d = Eigen::Vector3d::Zero();
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();

  Jet() = default;
  Jet(double value) : v(value) {}  // NOLINT: constants promote implicitly

  static Jet variable(double value, int index) {
    Jet j(value);
    j.d[index] = 1.0;
    return j;
  }

  Jet& operator+=(const Jet& o) {
    v += o.v;
    d += o.d;
    if constexpr (Order == 2) h += o.h;
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    v -= o.v;
    d -= o.d;
    if constexpr (Order == 2) h -= o.h;
    return *this;
  }
  Jet& operator*=(double s) {
    v *= s;
    d *= s;
    if constexpr (Order == 2) h *= s;
    return *this;
  }
};

using Jet1 = Jet<1>;
using Jet2 = Jet<2>;

template <class T>
struct is_jet : std::false_type {};
template <int O>
struct is_jet<Jet<O>> : std::true_type {};

inline double value_of(double x) { return x; }
template <int O>
double value_of(const Jet<O>& x) { return x.v; }

// Apply a scalar function given its value and first two derivatives at x.v.
template <int O>
Jet<O> lift(const Jet<O>& x, double f, double f1, double f2) {
  Jet<O> r(f);
  r.d = f1 * x.d;
  if constexpr (O == 2) r.h = f1 * x.h + f2 * (x.d * x.d.transpose());
  return r;
}

template <int O>
Jet<O> operator-(const Jet<O>& a) {
  Jet<O> r = a;
  r *= -1.0;
  return r;
}
template <int O>
Jet<O> operator+(Jet<O> a, const Jet<O>& b) { return a += b; }
template <int O>
Jet<O> operator-(Jet<O> a, const Jet<O>& b) { return a -= b; }
template <int O>
Jet<O> operator+(Jet<O> a, double b) { a.v += b; return a; }
template <int O>
Jet<O> operator+(double b, Jet<O> a) { a.v += b; return a; }
template <int O>
Jet<O> operator-(Jet<O> a, double b) { a.v -= b; return a; }
template <int O>
Jet<O> operator-(double b, const Jet<O>& a) { return (-a) + b; }
template <int O>
Jet<O> operator*(Jet<O> a, double s) { return a *= s; }
template <int O>
Jet<O> operator*(double s, Jet<O> a) { return a *= s; }
template <int O>
Jet<O> operator/(Jet<O> a, double s) { return a *= 1.0 / s; }

template <int O>
Jet<O> operator*(const Jet<O>& a, const Jet<O>& b) {
  Jet<O> r(a.v * b.v);
  r.d = a.d * b.v + b.d * a.v;
  if constexpr (O == 2)
    r.h = a.h * b.v + b.h * a.v + a.d * b.d.transpose() + b.d * a.d.transpose();
  return r;
}

template <int O>
Jet<O> reciprocal(const Jet<O>& a) {
  const double inv = 1.0 / a.v;
  return lift(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}
inline double reciprocal(double a) { return 1.0 / a; }

template <int O>
Jet<O> operator/(const Jet<O>& a, const Jet<O>& b) { return a * reciprocal(b); }
template <int O>
Jet<O> operator/(double a, const Jet<O>& b) { return a * reciprocal(b); }

template <int O>
Jet<O> exp(const Jet<O>& x) {
  const double e = std::exp(x.v);
  return lift(x, e, e, e);
}
template <int O>
Jet<O> log(const Jet<O>& x) {
  const double inv = 1.0 / x.v;
  return lift(x, std::log(x.v), inv, -inv * inv);
}
template <int O>
Jet<O> log1p(const Jet<O>& x) {
  const double inv = 1.0 / (1.0 + x.v);
  return lift(x, std::log1p(x.v), inv, -inv * inv);
}
template <int O>
Jet<O> expm1(const Jet<O>& x) {
  const double e = std::exp(x.v);
  return lift(x, std::expm1(x.v), e, e);
}
template <int O>
Jet<O> sqrt(const Jet<O>& x) {
  const double s = std::sqrt(x.v);
  return lift(x, s, 0.5 / s, -0.25 / (s * x.v));
}
template <int O>
Jet<O> pow(const Jet<O>& x, double e) {
  const double f = std::pow(x.v, e);
  return lift(x, f, e * f / x.v, e * (e - 1.0) * f / (x.v * x.v));
}
template <int O>
Jet<O> sin(const Jet<O>& x) {
  const double s = std::sin(x.v);
  return lift(x, s, std::cos(x.v), -s);
}
template <int O>
Jet<O> cos(const Jet<O>& x) {
  const double c = std::cos(x.v);
  return lift(x, c, -std::sin(x.v), -c);
}
template <int O>
Jet<O> sinh(const Jet<O>& x) {
  const double s = std::sinh(x.v);
  return lift(x, s, std::cosh(x.v), s);
}
template <int O>
Jet<O> cosh(const Jet<O>& x) {
  const double c = std::cosh(x.v);
  return lift(x, c, std::sinh(x.v), c);
}
template <int O>
Jet<O> tanh(const Jet<O>& x) {
  const double t = std::tanh(x.v);
  const double s = 1.0 - t * t;
  return lift(x, t, s, -2.0 * t * s);
}
template <int O>
Jet<O> acosh(const Jet<O>& x) {
  const double q = x.v * x.v - 1.0;
  const double r = std::sqrt(q);
  return lift(x, std::acosh(x.v), 1.0 / r, -x.v / (q * r));
}

// Promote a double-valued variable vector to jets seeded as coordinates.
template <class T>
T seed(double value, int index) {
  if constexpr (is_jet<T>::value)
    return T::variable(value, index);
  else
    return value;
}

}  // namespace gkforge
