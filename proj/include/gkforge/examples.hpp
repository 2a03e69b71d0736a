#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "gkforge/diffops.hpp"
#include "gkforge/gk_assembly.hpp"
#include "gkforge/moment_space.hpp"
#include "gkforge/w_solutions.hpp"

namespace gkforge::examples {

// Standard Hopf surface on the cover chart (x1, y1, x2, y2) with w_j = x_j + i y_j and the
// circle generated by d/dy1 + d/dy2. Nothing depends on y1, y2.
class StandardHopf {
 public:
  static constexpr DirectionMask kActive{true, false, true, false};

  MomentPoint moment(const Eigen::Vector4d& c) const;
  double angle(const Eigen::Vector4d& c) const;  // closed form (|z2|^2 - |z1|^2) / (|z1|^2 + |z2|^2)
  double w(const Eigen::Vector4d& c) const;      // 1 / g(X, X)
  Eigen::Vector4d generator() const { return {0.0, 1.0, 0.0, 1.0}; }
  Eigen::Matrix4d metric(const Eigen::Vector4d& c) const;
  Eigen::Vector4d lee_form(const Eigen::Vector4d& c) const;
  PointFields fields(const Eigen::Vector4d& c) const;
  ChartFactory charts() const;

  // The holomorphic forms above are twice the Poisson-normalized ones (sigma Re(Omega_I)^T = 2).
  // With the same moment map, the ansatz at k_+ = k_- = 1, W = 4 W0 reproduces the metric 2 g.
  static SolitonParams ansatz_params();
  static constexpr double kAnsatzLambda = 4.0;
  static constexpr double kAnsatzMetricScale = 2.0;
};

struct DiagonalHopfParams {
  double a = 1.0;  // log|alpha|
  double b = 4.0;  // log|beta|
  int m = 1;
  int n = 2;
  // a, b > 0, m, n positive and coprime, a/b = m^2/n^2.
  void validate() const;
  double ratio() const { return a / b; }
};

// p(u) in (-1, 1) together with an antiderivative chi(u).
struct ProfileValue {
  double p = 0.0;
  double chi = 0.0;
};

class Profile {
 public:
  virtual ~Profile() = default;
  virtual ProfileValue operator()(double u) const = 0;
};

// Integrates (log((1-p)/(1+p)))' = (1 - a/b) p / 2 + (1 + a/b) / 2 from u = 0.
class SolitonProfile final : public Profile {
 public:
  explicit SolitonProfile(double ratio, double phi_at_zero = 0.0, double tolerance = 1e-13);
  ProfileValue operator()(double u) const override;

 private:
  double ratio_;
  double phi0_;
  double tol_;
};

// p = tanh(scale * u); a generic profile that is not a soliton.
class TanhProfile final : public Profile {
 public:
  explicit TanhProfile(double scale) : scale_(scale) {}
  ProfileValue operator()(double u) const override;

 private:
  double scale_;
};

class DiagonalHopf {
 public:
  DiagonalHopf(DiagonalHopfParams params, std::shared_ptr<const Profile> profile);

  const DiagonalHopfParams& params() const { return params_; }
  double argument(const Eigen::Vector4d& c) const;  // 2 (b/a x1 - x2)
  MomentPoint moment(const Eigen::Vector4d& c) const;
  double profile_angle(const Eigen::Vector4d& c) const;
  // -tr(IJ)/4 of the resulting structure; the opposite sign of the profile.
  double angle(const Eigen::Vector4d& c) const { return -profile_angle(c); }
  Eigen::Vector4d generator() const;
  Eigen::Matrix4d metric(const Eigen::Vector4d& c) const;
  double w(const Eigen::Vector4d& c) const;  // 1 / g(X, X)
  Eigen::Matrix4cd holomorphic_i() const;
  Eigen::Matrix4cd holomorphic_j(const Eigen::Vector4d& c) const;

  // Spread over the chart points of log((1-p)/(1+p)) - (2/n mu_+ + 2/m mu_-).
  double phi_linearity_residual(const std::vector<Eigen::Vector4d>& points) const;

 private:
  DiagonalHopfParams params_;
  std::shared_ptr<const Profile> profile_;
};

// Gibbons-Hawking data: p = 0, flat h, W = mass + sum 1/(2 r_j).
struct GibbonsHawking {
  std::shared_ptr<const AngleField> angle;
  std::shared_ptr<const ScalarField> w;
  std::vector<MomentPoint> centres;
  double mass = 0.0;
};

GibbonsHawking gibbons_hawking(double mass, std::vector<MomentPoint> centres);

// Angle of the LeBrun dictionary, p = 2 exp(2 mu_-) - 1 on {mu_- < 0}.
class LeBrunAngle final : public AngleField {
 public:
  Jet2 angle(const MomentPoint& x) const override;
  Jet1 angle1(const MomentPoint& x) const override;
  double angle_value(const MomentPoint& x) const override;
};

// Hyperbolic Green's sum V = 1 + sum_j G_{(0,0,lambda^j)} on the upper half space and the
// induced W = V (x^2 + y^2 + z^2) / z^2 on moment space.
class LeBrunInoue {
 public:
  explicit LeBrunInoue(double lambda, double tail_tolerance = 1e-14, int max_terms = 4000);

  double lambda() const { return lambda_; }
  static Eigen::Vector3d to_half_space(const MomentPoint& x);
  static MomentPoint from_half_space(const Eigen::Vector3d& q);

  // Green's function of the hyperbolic Laplacian with -2 pi delta, 1/2 (coth d - 1).
  static double green(const Eigen::Vector3d& q, const Eigen::Vector3d& pole);

  double potential(const Eigen::Vector3d& q) const;
  double truncation_bound(const Eigen::Vector3d& q) const;
  // z^2 (V_xx + V_yy + V_zz) - z V_z by central differences.
  double hyperbolic_laplacian_fd(const Eigen::Vector3d& q, const FdScheme& scheme = {4, 1e-3}) const;
  // (z^2 / (x^2 + y^2 + z^2))^2 times the hyperbolic metric, pulled back to (mu1, mu_+, mu_-).
  Eigen::Matrix3d pulled_back_metric(const MomentPoint& x) const;

  std::shared_ptr<const AngleField> angle() const { return angle_; }
  std::shared_ptr<const ScalarField> w() const { return w_; }

 private:
  double lambda_;
  double tail_tol_;
  int max_terms_;
  std::shared_ptr<const AngleField> angle_;
  std::shared_ptr<const ScalarField> w_;
};

}  // namespace gkforge::examples
