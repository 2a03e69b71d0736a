#pragma once

#include <Eigen/Dense>
#include <memory>

#include "gkforge/connection_bundle.hpp"
#include "gkforge/forms.hpp"
#include "gkforge/moment_space.hpp"
#include "gkforge/w_solutions.hpp"

namespace gkforge {

// Chart coordinates (t, mu1, mu_+, mu_-); t is the fibre coordinate with X = d/dt.
struct ChartPoint {
  double t = 0.0;
  MomentPoint base;

  Eigen::Vector4d coords() const { return {t, base.mu1, base.mu_plus, base.mu_minus}; }
  static ChartPoint from_coords(const Eigen::Vector4d& c) { return {c[0], {c[1], c[2], c[3]}}; }
};

// Everything in the coordinate basis (d/dt, d/dmu1, d/dmu_+, d/dmu_-) or its dual.
// Endomorphisms act on column vectors; 2-forms are antisymmetric matrices with
// form(u, v) = u^T M v. The forms I Omega and J Omega are Omega(I., .) and Omega(J., .).
struct AssembledTensors {
  Eigen::Matrix4d g, I, J, K;
  Eigen::Matrix4d omega, i_omega, j_omega;
  Eigen::Matrix4d sigma;  // Poisson bivector 1/2 [I, J] g^{-1}, inverse transpose of omega
  Eigen::Matrix4cd omega_i, omega_j;
  Eigen::Matrix4d frame;  // columns X, IX, JX, KX
  Eigen::Vector4d eta;    // connection form dt + A
  double w = 0.0;
  double angle = 0.0;
};

// Pointwise algebra: frame conjugation from the angle, W and the potential value A(x).
AssembledTensors assemble(double angle, double w, const Eigen::Vector3d& potential);

// Kahler forms g(I., .) and g(J., .).
Eigen::Matrix4d kahler_form(const Eigen::Matrix4d& g, const Eigen::Matrix4d& complex_structure);

// Holomorphic 2-forms from the coframe formulas (independent of the frame path).
struct HolomorphicForms {
  Eigen::Matrix4cd omega_i;
  Eigen::Matrix4cd omega_j;
};
HolomorphicForms holomorphic_forms(double angle, double w, const Eigen::Vector3d& potential);

// Unique almost complex structure making a decomposable complex 2-form of type (2,0):
// -i on its kernel, +i on the conjugate kernel.
Eigen::Matrix4d complex_structure_from_form(const Eigen::Matrix4cd& form);

struct TypeCheck {
  double square = 0.0;       // |form ^ form|
  double type_defect = 0.0;  // max |form(I., .) - i form|
};
TypeCheck check_holomorphic(const Eigen::Matrix4cd& form, const Eigen::Matrix4d& complex_structure);

struct LeeData {
  Eigen::Vector4d theta_i;  // Lee form of (g, I); theta_J = -theta_I
  ThreeForm4 torsion;       // H = -*_g theta_I, orientation dt^dmu1^dmu_+^dmu_- positive
};
LeeData lee_form(const Jet1& angle, const AssembledTensors& t);

// Soliton potential f = 1/2 (Phi - 2 log(1 + e^Phi) - a_+ mu_+ + a_- mu_-), up to a constant.
template <class T>
T soliton_potential(const SolitonParams& s, const T& mu_plus, const T& mu_minus) {
  using std::exp;
  using std::log1p;
  const T ph = phi(s, mu_plus, mu_minus);
  // log(1 + e^x) without overflow.
  const T softplus =
      value_of(ph) > 0.0 ? ph + log1p(exp(-ph)) : log1p(exp(ph));
  return 0.5 * (ph - 2.0 * softplus - s.a_plus() * mu_plus + s.a_minus() * mu_minus);
}
double soliton_potential(const SolitonParams& s, const MomentPoint& x);
Jet2 soliton_potential_jet(const SolitonParams& s, const MomentPoint& x);
// df = 1/2 (p (a_+ dmu_+ + a_- dmu_-) - a_+ dmu_+ + a_- dmu_-).
Eigen::Vector3d soliton_potential_gradient(const SolitonParams& s, const MomentPoint& x);

// A GK structure on one chart: angle function, W and a gauge potential.
class GkStructure {
 public:
  GkStructure(std::shared_ptr<const AngleField> angle, std::shared_ptr<const ScalarField> w,
              GaugePotential potential);

  AssembledTensors tensors(const ChartPoint& x) const;
  LeeData lee(const ChartPoint& x) const;

  const AngleField& angle() const { return *angle_; }
  const ScalarField& w() const { return *w_; }
  const GaugePotential& potential() const { return potential_; }
  GkStructure recentred(const MomentPoint& base) const;

 private:
  std::shared_ptr<const AngleField> angle_;
  std::shared_ptr<const ScalarField> w_;
  GaugePotential potential_;
};

}  // namespace gkforge
