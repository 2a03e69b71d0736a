#include "gkforge/gk_assembly.hpp"

#include <complex>

#include "gkforge/errors.hpp"
#include "gkforge/frame_algebra.hpp"

namespace gkforge {

namespace {

using Vec4 = Eigen::Vector4d;
using Vec4c = Eigen::Vector4cd;

// Coordinate 1-forms dmu1, dmu2 = dmu_+ + dmu_-, dmu3 = dmu_+ - dmu_-.
const Vec4 kDmu1(0.0, 1.0, 0.0, 0.0);
const Vec4 kDmu2(0.0, 0.0, 1.0, 1.0);
const Vec4 kDmu3(0.0, 0.0, 1.0, -1.0);

Vec4 connection_form(const Eigen::Vector3d& potential) {
  return {1.0, potential[0], potential[1], potential[2]};
}

void check_w(double w) {
  if (!(w > 0.0) || !std::isfinite(w))
    throw DomainError("W must be positive and finite for a nondegenerate structure");
}

}  // namespace

AssembledTensors assemble(double angle, double w, const Eigen::Vector3d& potential) {
  const AngleValue p(angle);
  check_w(w);

  // Frame dual to (eta, dmu1, dmu2, dmu3): e_i = d/dmu_i - A(d/dmu_i) d/dt.
  Eigen::Matrix<double, 4, 3> e = Eigen::Matrix<double, 4, 3>::Zero();
  e(1, 0) = 1.0;
  e(2, 1) = 0.5;
  e(3, 1) = 0.5;
  e(2, 2) = 0.5;
  e(3, 2) = -0.5;
  for (int k = 0; k < 3; ++k) e(0, k) = -potential.dot(e.col(k).tail<3>());

  Eigen::Matrix4d frame;
  frame.col(0) = Vec4(1.0, 0.0, 0.0, 0.0);
  frame.col(1) = e.col(2) / w;
  frame.col(2) = -e.col(1) / w;
  frame.col(3) = -e.col(0) / w;
  const Eigen::Matrix4d inv = frame.inverse();

  const FrameTensors f = frame_tensors(p);
  AssembledTensors t;
  t.frame = frame;
  t.w = w;
  t.angle = angle;
  t.eta = connection_form(potential);
  t.g = inv.transpose() * (f.g / w) * inv;
  t.I = frame * f.I * inv;
  t.J = frame * f.J * inv;
  t.K = frame * f.K * inv;
  t.omega = inv.transpose() * (f.Omega / w) * inv;
  t.i_omega = t.I.transpose() * t.omega;
  t.j_omega = t.J.transpose() * t.omega;
  t.sigma = poisson_bivector(t.g, t.I, t.J);
  const HolomorphicForms hol = holomorphic_forms(angle, w, potential);
  t.omega_i = hol.omega_i;
  t.omega_j = hol.omega_j;
  return t;
}

Eigen::Matrix4d kahler_form(const Eigen::Matrix4d& g, const Eigen::Matrix4d& complex_structure) {
  return complex_structure.transpose() * g;
}

HolomorphicForms holomorphic_forms(double angle, double w, const Eigen::Vector3d& potential) {
  const double p = AngleValue(angle).value();
  check_w(w);
  const std::complex<double> i(0.0, 1.0);
  const Vec4c eta = connection_form(potential).cast<std::complex<double>>();
  const Vec4c m1 = kDmu1.cast<std::complex<double>>();
  const Vec4c m2 = kDmu2.cast<std::complex<double>>();
  const Vec4c m3 = kDmu3.cast<std::complex<double>>();
  const Vec4c left_i = -m1 + i * m2;
  const Vec4c right_i = eta + i * w * (m3 - p * m2);
  const Vec4c left_j = -m1 + i * m3;
  const Vec4c right_j = eta + i * w * (-m2 + p * m3);
  return {wedge(left_i, right_i), wedge(left_j, right_j)};
}

Eigen::Matrix4d complex_structure_from_form(const Eigen::Matrix4cd& form) {
  Eigen::FullPivLU<Eigen::Matrix4cd> lu(form);
  lu.setThreshold(1e-10);
  const Eigen::MatrixXcd kernel = lu.kernel();
  if (kernel.cols() != 2)
    throw DomainError("complex 2-form is not decomposable and nondegenerate (kernel dim != 2)");
  Eigen::Matrix4cd basis;
  basis << kernel.conjugate(), kernel;
  const std::complex<double> i(0.0, 1.0);
  const Eigen::Vector4cd eig(i, i, -i, -i);
  const Eigen::Matrix4cd j = basis * eig.asDiagonal() * basis.inverse();
  return j.real();
}

TypeCheck check_holomorphic(const Eigen::Matrix4cd& form, const Eigen::Matrix4d& complex_structure) {
  const std::complex<double> i(0.0, 1.0);
  const Eigen::Matrix4cd defect = complex_structure.transpose().cast<std::complex<double>>() * form - i * form;
  return {std::abs(wedge_top(form, form)), defect.cwiseAbs().maxCoeff()};
}

LeeData lee_form(const Jet1& angle, const AssembledTensors& t) {
  const double p = angle.v;
  const double p1 = angle.d[0];
  const double pp = angle.d[1];
  const double pm = angle.d[2];
  const Vec4 d_plus(0.0, 0.0, 1.0, 0.0);
  const Vec4 d_minus(0.0, 0.0, 0.0, 1.0);
  LeeData out;
  out.theta_i = -(p1 / (1.0 - p * p)) / t.w * t.eta + pp / (1.0 - p) * d_minus -
                pm / (1.0 + p) * d_plus;
  out.torsion = -1.0 * hodge_star_1(t.g, out.theta_i, 1.0);
  return out;
}

double soliton_potential(const SolitonParams& s, const MomentPoint& x) {
  return soliton_potential(s, x.mu_plus, x.mu_minus);
}

Jet2 soliton_potential_jet(const SolitonParams& s, const MomentPoint& x) {
  const auto m = MomentJet<Jet2>::seeded(x);
  return soliton_potential(s, m.mu_plus, m.mu_minus);
}

Eigen::Vector3d soliton_potential_gradient(const SolitonParams& s, const MomentPoint& x) {
  const double p = angle_from_phi(phi(s, x));
  const double ap = s.a_plus();
  const double am = s.a_minus();
  return {0.0, 0.5 * (p * ap - ap), 0.5 * (p * am + am)};
}

GkStructure::GkStructure(std::shared_ptr<const AngleField> angle,
                         std::shared_ptr<const ScalarField> w, GaugePotential potential)
    : angle_(std::move(angle)), w_(std::move(w)), potential_(std::move(potential)) {
  if (!angle_ || !w_) throw InvalidParamsError("GK structure needs an angle field and W");
}

AssembledTensors GkStructure::tensors(const ChartPoint& x) const {
  return assemble(angle_->angle_value(x.base), w_->value(x.base), potential_(x.base));
}

LeeData GkStructure::lee(const ChartPoint& x) const {
  return lee_form(angle_->angle1(x.base), tensors(x));
}

GkStructure GkStructure::recentred(const MomentPoint& base) const {
  return GkStructure(angle_, w_, potential_.recentred(base));
}

}  // namespace gkforge
