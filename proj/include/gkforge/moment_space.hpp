#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <optional>
#include <variant>

#include "gkforge/frame_algebra.hpp"
#include "gkforge/jet.hpp"

namespace gkforge {

// Coordinates (mu1, mu_plus, mu_minus) on moment space; mu1 is never wrapped here.
struct MomentPoint {
  double mu1 = 0.0;
  double mu_plus = 0.0;
  double mu_minus = 0.0;

  static MomentPoint from_mu123(double mu1, double mu2, double mu3) {
    return {mu1, 0.5 * (mu2 + mu3), 0.5 * (mu2 - mu3)};
  }
  static MomentPoint from_vec(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }

  double mu2() const { return mu_plus + mu_minus; }
  double mu3() const { return mu_plus - mu_minus; }
  Eigen::Vector3d vec() const { return {mu1, mu_plus, mu_minus}; }
};

// Jet-valued coordinates: index 0 = mu1, 1 = mu_plus, 2 = mu_minus.
template <class T>
struct MomentJet {
  T mu1, mu_plus, mu_minus;

  static MomentJet seeded(const MomentPoint& x) {
    return {seed<T>(x.mu1, 0), seed<T>(x.mu_plus, 1), seed<T>(x.mu_minus, 2)};
  }
};

// Quantized soliton parameters a_+ = 2/k_+ and (optionally) a_- = 2/k_-.
class SolitonParams {
 public:
  static SolitonParams make(int k_plus, std::optional<int> k_minus = std::nullopt,
                            int l_plus = 0, int l_minus = 0, double phi_const = 0.0);

  int k_plus() const { return k_plus_; }
  std::optional<int> k_minus() const { return k_minus_; }
  int l_plus() const { return l_plus_; }
  int l_minus() const { return l_minus_; }
  double phi_const() const { return phi_const_; }
  bool has_minus() const { return k_minus_.has_value(); }

  double a_plus() const { return 2.0 / k_plus_; }
  double a_minus() const { return k_minus_ ? 2.0 / *k_minus_ : 0.0; }

  // Shifts mu_plus so that the additive constant in Phi disappears.
  MomentPoint absorb_constant(const MomentPoint& x) const {
    return {x.mu1, x.mu_plus + phi_const_ / a_plus(), x.mu_minus};
  }
  template <class T>
  T shifted_mu_plus(const T& mu_plus) const {
    return mu_plus + phi_const_ / a_plus();
  }

 private:
  SolitonParams(int kp, std::optional<int> km, int lp, int lm, double c)
      : k_plus_(kp), k_minus_(km), l_plus_(lp), l_minus_(lm), phi_const_(c) {}

  int k_plus_;
  std::optional<int> k_minus_;
  int l_plus_;
  int l_minus_;
  double phi_const_;
};

template <class T>
T phi(const SolitonParams& s, const T& mu_plus, const T& mu_minus) {
  return s.a_plus() * mu_plus + s.a_minus() * mu_minus + s.phi_const();
}
double phi(const SolitonParams& s, const MomentPoint& x);
// Same sum in long double; value-only paths round p and W once from it.
long double phi_extended(const SolitonParams& s, const MomentPoint& x);

// p = (1 - e^Phi)/(1 + e^Phi) = -tanh(Phi/2); saturates toward -+1.
double angle_from_phi(double phi_value);
double phi_from_angle(double p);

template <int O>
Jet<O> angle_from_phi(const Jet<O>& phi_value) {
  const double p = angle_from_phi(phi_value.v);
  const double dp = -0.5 * (1.0 - p * p);
  return lift(phi_value, p, dp, p * dp);
}

// Angle function p on moment space with exact first and second derivatives.
class AngleField {
 public:
  virtual ~AngleField() = default;
  virtual Jet2 angle(const MomentPoint& x) const = 0;
  virtual Jet1 angle1(const MomentPoint& x) const;
  virtual double angle_value(const MomentPoint& x) const { return angle(x).v; }
  // Non-null when p comes from the soliton ansatz.
  virtual const SolitonParams* soliton() const { return nullptr; }
};

class SolitonAngle final : public AngleField {
 public:
  explicit SolitonAngle(SolitonParams params) : params_(params) {}
  Jet2 angle(const MomentPoint& x) const override;
  Jet1 angle1(const MomentPoint& x) const override;
  double angle_value(const MomentPoint& x) const override;
  const SolitonParams* soliton() const override { return &params_; }
  const SolitonParams& params() const { return params_; }

 private:
  SolitonParams params_;
};

class ConstantAngle final : public AngleField {
 public:
  explicit ConstantAngle(double p) : p_(p) {}
  Jet2 angle(const MomentPoint&) const override { return Jet2(p_); }

 private:
  double p_;
};

// h = diag(1 - p^2, 2(1 - p), 2(1 + p)) in the basis (dmu1, dmu_plus, dmu_minus).
struct BaseMetric {
  Eigen::Vector3d diagonal;

  Eigen::Matrix3d matrix() const { return diagonal.asDiagonal(); }
  Eigen::Matrix3d inverse() const { return diagonal.cwiseInverse().asDiagonal(); }
  double determinant() const { return diagonal.prod(); }
};

BaseMetric base_metric(AngleValue p);

// Antisymmetric 3x3 component matrix of a 2-form in (dmu1, dmu_plus, dmu_minus).
using TwoForm3 = Eigen::Matrix3d;

// beta_0 = dmu1 ^ (p_2 dmu2 - p_3 dmu3), converted to the (mu1, mu_plus, mu_minus) basis.
TwoForm3 beta0(const AngleField& angle, const MomentPoint& x);

// Baseline solution as a function of the angle; shared by w_solutions.
template <class T>
T baseline_from_angle(double a_plus, double a_minus, const T& p) {
  return 1.0 / (a_plus * a_plus * (1.0 + p) + a_minus * a_minus * (1.0 - p));
}

// psi = 2 W0^2 / (e^{a_+ mu_+} + e^{-a_- mu_-}); h-tilde = psi^2 h.
template <class T>
T conformal_factor(const SolitonParams& s, const T& mu_plus, const T& mu_minus) {
  using std::exp;
  const T mp = s.shifted_mu_plus(mu_plus);
  const T p = angle_from_phi(s.a_plus() * mp + s.a_minus() * mu_minus);
  const T w0 = baseline_from_angle(s.a_plus(), s.a_minus(), p);
  return 2.0 * w0 * w0 / (exp(s.a_plus() * mp) + exp(-s.a_minus() * mu_minus));
}
double conformal_factor(const SolitonParams& s, const MomentPoint& x);
Eigen::Matrix3d conformal_metric(const SolitonParams& s, const MomentPoint& x);

// The two alternative closed forms of psi; used to cross-check conformal_factor.
struct ConformalFactorForms {
  double sum_form;
  double plus_form;
  double minus_form;
};
ConformalFactorForms conformal_factor_forms(const SolitonParams& s, const MomentPoint& x);

// ---------------------------------------------------------------- orbifold models

enum class ModelKind { HalfSpace, HalfSpaceZQuotient, Cone };

// Deck translation (mu1, mu_plus, mu_minus) -> (mu1 + c1p, mu_plus, mu_minus + c).
struct ZTranslation {
  double c1p = 0.0;
  double c = 0.0;
};

struct OrbifoldModel {
  ModelKind kind;
  SolitonParams params;
  std::optional<ZTranslation> z_translation;

  static OrbifoldModel for_params(const SolitonParams& params,
                                  std::optional<ZTranslation> zq = std::nullopt);
};

// (mu1 mod 2pi, rho, mu_minus) with rho = exp(a_+ mu_+ / 2).
struct HalfSpaceCoords {
  double angle;
  double rho;
  double mu_minus;
};

// (mu1 mod 2pi, rho1, rho2).
struct ConeCoords {
  double angle;
  double rho1;
  double rho2;
};

using ModelCoords = std::variant<HalfSpaceCoords, ConeCoords>;

ModelCoords to_model_coords(const OrbifoldModel& model, const MomentPoint& x);
MomentPoint from_model_coords(const OrbifoldModel& model, const ModelCoords& c);

// Closed forms of h in model coordinates (basis order as in the coordinate structs).
Eigen::Matrix3d half_space_metric(const SolitonParams& s, const HalfSpaceCoords& c);
Eigen::Matrix3d cone_metric(const SolitonParams& s, const ConeCoords& c);

template <class T>
struct ConeRadii {
  T rho1;
  T rho2;
};

// Radii for exponents a_+, a_- and a mu_plus that already has phi_const absorbed.
template <class T>
ConeRadii<T> cone_radii(double ap, double am, const T& mu_plus, const T& mu_minus) {
  using std::exp;
  const T ep = exp(ap * mu_plus);
  const T em = exp(-am * mu_minus);
  const T q = am * am * ep + ap * ap * em;
  return {exp(-0.5 * am * mu_minus) / q, exp(0.5 * ap * mu_plus) / q};
}

template <class T>
ConeRadii<T> cone_radii(const SolitonParams& s, const T& mu_plus, const T& mu_minus) {
  return cone_radii(s.a_plus(), s.a_minus(), s.shifted_mu_plus(mu_plus), mu_minus);
}

// Smallest model radius of x: rho for half-space models, min(rho1, rho2) for cones.
double model_radius(const OrbifoldModel& model, const MomentPoint& x);

// ---------------------------------------------------------------- flat covers

// A point of C x C* (a_- = 0) or C^2 \ {0} (a_- != 0).
struct CoverPoint {
  std::complex<double> z;
  std::complex<double> w;
};

// Moment point of a cover point; mu1 is returned in (-pi, pi] shifted by 2pi m as needed.
MomentPoint moment_from_cover(const OrbifoldModel& model, const CoverPoint& c);
// Representative cover point of the S^1-orbit above x.
CoverPoint cover_from_moment(const OrbifoldModel& model, const MomentPoint& x);
// Flat metric on the cover in real coordinates (Re z, Im z, Re w, Im w).
Eigen::Matrix4d flat_cover_metric(const OrbifoldModel& model, const CoverPoint& c);

// Circumference over radius of the mu1-circle at model radius rho in N(a_+, 0),
// both measured in h by numeric quadrature.
double cone_circle_ratio(int k_plus, double rho);

}  // namespace gkforge
