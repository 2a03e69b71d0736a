#pragma once

#include <Eigen/Dense>
#include <array>

namespace gkforge {

// Fully antisymmetric 3-form on a 4-dimensional chart, all 64 components stored.
struct ThreeForm4 {
  std::array<double, 64> c{};

  double& operator()(int i, int j, int k) { return c[16 * i + 4 * j + k]; }
  double operator()(int i, int j, int k) const { return c[16 * i + 4 * j + k]; }

  ThreeForm4& operator+=(const ThreeForm4& o);
  ThreeForm4& operator-=(const ThreeForm4& o);
  ThreeForm4& operator*=(double s);
  double max_abs() const;
};

ThreeForm4 operator+(ThreeForm4 a, const ThreeForm4& b);
ThreeForm4 operator-(ThreeForm4 a, const ThreeForm4& b);
ThreeForm4 operator*(double s, ThreeForm4 a);

// Sign of the permutation (i, j, k, l) of (0, 1, 2, 3); 0 on repeated indices.
int levi_civita(int i, int j, int k, int l);

// alpha ^ beta as an antisymmetric matrix.
template <class Vec>
auto wedge(const Vec& a, const Vec& b) {
  return (a * b.transpose() - b * a.transpose()).eval();
}

// Coefficient of dx0^dx1^dx2^dx3 in a ^ b for 2-forms a, b (full antisymmetric matrices).
template <class Mat>
auto wedge_top(const Mat& a, const Mat& b) {
  return a(0, 1) * b(2, 3) - a(0, 2) * b(1, 3) + a(0, 3) * b(1, 2) + a(1, 2) * b(0, 3) -
         a(1, 3) * b(0, 2) + a(2, 3) * b(0, 1);
}

// Riemannian Hodge stars of g; orientation = +1 makes dx0^dx1^dx2^dx3 positive.
ThreeForm4 hodge_star_1(const Eigen::Matrix4d& g, const Eigen::Vector4d& alpha,
                        double orientation = 1.0);
Eigen::Vector4d hodge_star_3(const Eigen::Matrix4d& g, const ThreeForm4& h,
                             double orientation = 1.0);
Eigen::Matrix4d hodge_star_2(const Eigen::Matrix4d& g, const Eigen::Matrix4d& f,
                             double orientation = 1.0);

}  // namespace gkforge
