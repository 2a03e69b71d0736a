#include "gkforge/frame_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gkforge/errors.hpp"

namespace gkforge {

namespace {

double max_abs(const Eigen::Matrix4d& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

AngleValue::AngleValue(double p) : p_(p) {
  if (!std::isfinite(p) || std::abs(p) >= 1.0 - kMargin) {
    std::ostringstream msg;
    msg << "angle value p = " << p << " is on or beyond the degeneracy locus |p| = 1";
    throw DegenerateAngleError(msg.str());
  }
}

FrameTensors frame_tensors(AngleValue angle) {
  const double p = angle.value();
  FrameTensors t;
  t.g << 1, 0, 0, 0,
         0, 1, p, 0,
         0, p, 1, 0,
         0, 0, 0, 1 - p * p;
  t.I << 0, -1, -p, 0,
         1, 0, 0, p,
         0, 0, 0, -1,
         0, 0, 1, 0;
  t.J << 0, -p, -1, 0,
         0, 0, 0, 1,
         1, 0, 0, -p,
         0, -1, 0, 0;
  t.K << 0, 0, 0, p * p - 1,
         0, -p, -1, 0,
         0, 1, p, 0,
         1, 0, 0, 0;
  t.Omega << 0, 0, 0, -1,
             0, 0, -1, 0,
             0, 1, 0, 0,
             1, 0, 0, 0;
  return t;
}

Eigen::Matrix4d poisson_bivector(const Eigen::Matrix4d& g, const Eigen::Matrix4d& I,
                                 const Eigen::Matrix4d& J) {
  const Eigen::Matrix4d commutator = I * J - J * I;
  return 0.5 * commutator * g.inverse();
}

double IdentityResiduals::max() const {
  double m = 0.0;
  for (const auto& e : entries) m = std::max(m, e.value);
  return m;
}

double IdentityResiduals::get(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e.value;
  throw std::out_of_range("no residual named " + name);
}

IdentityResiduals check_frame_identities(const FrameTensors& t, AngleValue angle, double tol) {
  const double p = angle.value();
  const Eigen::Matrix4d id = Eigen::Matrix4d::Identity();
  const Eigen::Matrix4d sigma = poisson_bivector(t.g, t.I, t.J);

  IdentityResiduals r;
  r.tolerance = tol;
  r.entries = {
      {"I_squared", max_abs(t.I * t.I + id)},
      {"J_squared", max_abs(t.J * t.J + id)},
      {"K_squared", max_abs(t.K * t.K + (1.0 - p * p) * id)},
      {"anticommutator", max_abs(t.I * t.J + t.J * t.I + 2.0 * p * id)},
      {"K_from_IJ", max_abs(t.K - (t.I * t.J + p * id))},
      {"K_from_JI", max_abs(t.K - (-t.J * t.I - p * id))},
      {"K_half_commutator", max_abs(t.K - 0.5 * (t.I * t.J - t.J * t.I))},
      {"g_symmetric", max_abs(t.g - t.g.transpose())},
      {"I_orthogonal", max_abs(t.I.transpose() * t.g * t.I - t.g)},
      {"J_orthogonal", max_abs(t.J.transpose() * t.g * t.J - t.g)},
      {"Omega_from_K", max_abs(t.Omega - t.K.inverse().transpose() * t.g)},
      {"Omega_antisymmetric", max_abs(t.Omega + t.Omega.transpose())},
      {"sigma_inverts_Omega", max_abs(sigma * t.Omega.transpose() - id)},
      {"det_g", std::abs(t.g.determinant() - (1.0 - p * p) * (1.0 - p * p))},
  };
  return r;
}

}  // namespace gkforge
