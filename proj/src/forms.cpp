#include "gkforge/forms.hpp"

#include <algorithm>
#include <cmath>

namespace gkforge {

ThreeForm4& ThreeForm4::operator+=(const ThreeForm4& o) {
  for (std::size_t n = 0; n < c.size(); ++n) c[n] += o.c[n];
  return *this;
}

ThreeForm4& ThreeForm4::operator-=(const ThreeForm4& o) {
  for (std::size_t n = 0; n < c.size(); ++n) c[n] -= o.c[n];
  return *this;
}

ThreeForm4& ThreeForm4::operator*=(double s) {
  for (double& v : c) v *= s;
  return *this;
}

double ThreeForm4::max_abs() const {
  double m = 0.0;
  for (double v : c) m = std::max(m, std::abs(v));
  return m;
}

ThreeForm4 operator+(ThreeForm4 a, const ThreeForm4& b) { return a += b; }
ThreeForm4 operator-(ThreeForm4 a, const ThreeForm4& b) { return a -= b; }
ThreeForm4 operator*(double s, ThreeForm4 a) { return a *= s; }

int levi_civita(int i, int j, int k, int l) {
  const std::array<int, 4> p{i, j, k, l};
  int sign = 1;
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      if (p[a] == p[b]) return 0;
      if (p[a] > p[b]) sign = -sign;
    }
  }
  return sign;
}

namespace {

double volume_factor(const Eigen::Matrix4d& g, double orientation) {
  return orientation * std::sqrt(std::abs(g.determinant()));
}

}  // namespace

ThreeForm4 hodge_star_1(const Eigen::Matrix4d& g, const Eigen::Vector4d& alpha,
                        double orientation) {
  const Eigen::Vector4d up = g.ldlt().solve(alpha);
  const double vol = volume_factor(g, orientation);
  ThreeForm4 out;
  for (int b = 0; b < 4; ++b)
    for (int c = 0; c < 4; ++c)
      for (int d = 0; d < 4; ++d) {
        double s = 0.0;
        for (int a = 0; a < 4; ++a) s += up[a] * levi_civita(a, b, c, d);
        out(b, c, d) = vol * s;
      }
  return out;
}

Eigen::Vector4d hodge_star_3(const Eigen::Matrix4d& g, const ThreeForm4& h,
                             double orientation) {
  const Eigen::Matrix4d gi = g.inverse();
  ThreeForm4 up;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        double s = 0.0;
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) s += gi(a, i) * gi(b, j) * gi(c, k) * h(i, j, k);
        up(a, b, c) = s;
      }
  const double vol = volume_factor(g, orientation);
  Eigen::Vector4d out = Eigen::Vector4d::Zero();
  for (int d = 0; d < 4; ++d)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c) out[d] += up(a, b, c) * levi_civita(a, b, c, d);
  return vol * out / 6.0;
}

Eigen::Matrix4d hodge_star_2(const Eigen::Matrix4d& g, const Eigen::Matrix4d& f,
                             double orientation) {
  const Eigen::Matrix4d gi = g.inverse();
  const Eigen::Matrix4d up = gi * f * gi.transpose();
  const double vol = volume_factor(g, orientation);
  Eigen::Matrix4d out = Eigen::Matrix4d::Zero();
  for (int c = 0; c < 4; ++c)
    for (int d = 0; d < 4; ++d)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) out(c, d) += up(a, b) * levi_civita(a, b, c, d);
  return vol * out / 2.0;
}

}  // namespace gkforge
