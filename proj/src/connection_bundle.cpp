#include "gkforge/connection_bundle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gkforge/errors.hpp"
#include "gkforge/quadrature.hpp"

namespace gkforge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

TwoForm3 antisymmetric(double b01, double b02, double b12) {
  TwoForm3 b = TwoForm3::Zero();
  b(0, 1) = b01;
  b(1, 0) = -b01;
  b(0, 2) = b02;
  b(2, 0) = -b02;
  b(1, 2) = b12;
  b(2, 1) = -b12;
  return b;
}

// Columns: d/dmu1, d/dmu2, d/dmu3 written in (mu1, mu_+, mu_-) components.
Eigen::Matrix3d mu123_to_pm() {
  Eigen::Matrix3d j;
  j << 1.0, 0.0, 0.0,
       0.0, 0.5, 0.5,
       0.0, 0.5, -0.5;
  return j;
}

double segment_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                        const Eigen::Vector3d& q) {
  const Eigen::Vector3d ab = b - a;
  const double len2 = ab.squaredNorm();
  const double s = len2 > 0.0 ? std::clamp((q - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + s * ab - q).norm();
}

}  // namespace

TwoForm3 hodge_star_h(const BaseMetric& h, const Eigen::Vector3d& one_form) {
  const Eigen::Vector3d up = one_form.cwiseQuotient(h.diagonal);
  const double vol = -std::sqrt(h.determinant());
  // (*a)_{jk} = vol * up^i eps_{ijk}
  return antisymmetric(vol * up[2], -vol * up[1], vol * up[0]);
}

TwoForm3 curvature(const AngleField& angle, const ScalarField& w, const MomentPoint& x) {
  const Jet1 wj = w.jet1(x);
  const AngleValue p(angle.angle_value(x));
  return hodge_star_h(base_metric(p), wj.d) + wj.v * beta0(angle, x);
}

TwoForm3 curvature_from_components(const AngleField& angle, const ScalarField& w,
                                   const MomentPoint& x) {
  const Jet1 wj = w.jet1(x);
  const Jet1 p = angle.angle1(x);
  [[maybe_unused]] const AngleValue checked(p.v);
  const Jet1 pw = p * wj;
  const auto d2 = [](const Jet1& f) { return 0.5 * (f.d[1] + f.d[2]); };
  const auto d3 = [](const Jet1& f) { return 0.5 * (f.d[1] - f.d[2]); };
  const double b23 = wj.d[0];
  const double b31 = d2(wj) + d3(pw);
  const double b12 = d3(wj) + d2(pw);
  // dmu2 = dmu_+ + dmu_-, dmu3 = dmu_+ - dmu_-.
  return antisymmetric(b12 - b31, b12 + b31, -2.0 * b23);
}

GaugePotential::GaugePotential(std::shared_ptr<const AngleField> angle,
                               std::shared_ptr<const ScalarField> w, MomentPoint base,
                               std::vector<MomentPoint> poles, int order,
                               Eigen::Vector3d closed_shift)
    : angle_(std::move(angle)),
      w_(std::move(w)),
      base_(base),
      poles_(std::move(poles)),
      order_(order),
      closed_shift_(std::move(closed_shift)) {
  if (!angle_ || !w_) throw InvalidParamsError("gauge potential needs an angle field and W");
  if (order_ < 2) throw InvalidParamsError("gauge potential quadrature order must be >= 2");
  for (const auto& z : poles_) {
    if ((z.vec() - base_.vec()).norm() == 0.0)
      throw PoleError("gauge chart base point sits on a pole");
  }
}

Eigen::Vector3d GaugePotential::operator()(const MomentPoint& x) const {
  const Eigen::Vector3d x0 = base_.vec();
  const Eigen::Vector3d v = x.vec() - x0;
  for (const auto& z : poles_) {
    const double scale = std::max(1.0, v.norm());
    if (segment_distance(x0, x.vec(), z.vec()) <= 1e-9 * scale)
      throw PoleError("gauge chart segment passes through a pole");
  }
  const GaussRule& rule = gauss_legendre_unit(order_);
  Eigen::Vector3d a = Eigen::Vector3d::Zero();
  for (std::size_t n = 0; n < rule.nodes.size(); ++n) {
    const double s = rule.nodes[n];
    const TwoForm3 b = curvature(*angle_, *w_, MomentPoint::from_vec(x0 + s * v));
    a += rule.weights[n] * s * (b.transpose() * v);
  }
  return a + closed_shift_;
}

GaugePotential GaugePotential::recentred(const MomentPoint& base) const {
  return GaugePotential(angle_, w_, base, poles_, order_, closed_shift_);
}

Eigen::Vector3d holonomy_shift(const OrbifoldModel& model, double holonomy) {
  if (!(holonomy >= 0.0 && holonomy < 1.0))
    throw InvalidParamsError("holonomy must lie in [0, 1)");
  if (holonomy == 0.0) return Eigen::Vector3d::Zero();
  if (model.kind != ModelKind::HalfSpaceZQuotient)
    throw InvalidParamsError("a nonzero holonomy needs the Z-quotient model");
  return {0.0, 0.0, kTwoPi * holonomy / model.z_translation->c};
}

namespace {

double sphere_flux(const AngleField& angle, const ScalarField& w, const Eigen::Vector3d& c123,
                   const Eigen::Matrix3d& shape, int n_theta, int n_phi) {
  const Eigen::Matrix3d jac = mu123_to_pm();
  const GaussRule& rule = gauss_legendre_unit(n_theta);
  const double pi = std::numbers::pi;
  double total = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double th = pi * rule.nodes[i];
    const double st = std::sin(th);
    const double ct = std::cos(th);
    double ring = 0.0;
    for (int j = 0; j < n_phi; ++j) {
      const double ph = kTwoPi * j / n_phi;
      const double sp = std::sin(ph);
      const double cp = std::cos(ph);
      const Eigen::Vector3d n(st * cp, st * sp, ct);
      const Eigen::Vector3d n_th(ct * cp, ct * sp, -st);
      const Eigen::Vector3d n_ph(-st * sp, st * cp, 0.0);
      const Eigen::Vector3d y = c123 + shape * n;
      const MomentPoint x = MomentPoint::from_mu123(y[0], y[1], y[2]);
      const Eigen::Vector3d t_th = jac * (shape * n_th);
      const Eigen::Vector3d t_ph = jac * (shape * n_ph);
      ring += t_th.dot(curvature(angle, w, x) * t_ph);
    }
    total += rule.weights[i] * pi * ring * kTwoPi / n_phi;
  }
  return total;
}

}  // namespace

FluxResult flux(const AngleField& angle, const ScalarField& w, const MomentPoint& center,
                double radius, const SphereQuadrature& quad,
                const std::vector<MomentPoint>& poles) {
  if (!(radius > 0.0)) throw DomainError("flux sphere radius must be positive");
  if (quad.n_theta < 4 || quad.n_phi < 8) throw InvalidParamsError("flux quadrature too coarse");
  const Eigen::Matrix3d jac = mu123_to_pm();
  const BaseMetric h = base_metric(AngleValue(angle.angle_value(center)));
  const Eigen::Matrix3d h123 = jac.transpose() * h.matrix() * jac;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(h123);
  const Eigen::Matrix3d shape = radius * eig.operatorInverseSqrt();

  const Eigen::Vector3d c123(center.mu1, center.mu2(), center.mu3());
  for (const auto& z : poles) {
    const Eigen::Vector3d dz = Eigen::Vector3d(z.mu1, z.mu2(), z.mu3()) - c123;
    const double hdist = std::sqrt(dz.dot(h123 * dz));
    if (std::abs(hdist - radius) < 1e-3 * radius)
      throw PoleError("flux sphere passes through a pole");
  }

  const double fine = sphere_flux(angle, w, c123, shape, quad.n_theta, quad.n_phi);
  const double coarse = sphere_flux(angle, w, c123, shape, quad.n_theta / 2, quad.n_phi / 2);
  return {fine, std::abs(fine - coarse)};
}

namespace {

struct SeifertSlice {
  MomentPoint x;
  Eigen::Vector3d d_chi;  // tangent along chi in (mu1, mu_+, mu_-) components
};

SeifertSlice cone_slice(const SolitonParams& s, double r, double chi, double mu1) {
  const double ap = s.a_plus();
  const double am = s.a_minus();
  const double r1 = r * std::cos(chi);
  const double r2 = r * std::sin(chi);
  const double denom = am * am * r2 * r2 + ap * ap * r1 * r1;
  const double log_q = -std::log(denom);
  const double dlog_q = -2.0 * r1 * r2 * (am * am - ap * ap) / denom;
  const double unshift = s.phi_const() / ap;
  const MomentPoint x{mu1, (2.0 * std::log(r2) + 2.0 * log_q) / ap - unshift,
                      -(2.0 * std::log(r1) + 2.0 * log_q) / am};
  const double d_plus = (2.0 * r1 / r2 + 2.0 * dlog_q) / ap;
  const double d_minus = -(-2.0 * r2 / r1 + 2.0 * dlog_q) / am;
  return {x, Eigen::Vector3d(0.0, d_plus, d_minus)};
}

double seifert_quadrature(const SolitonParams& s, const AngleField& angle, const ScalarField& w,
                          double r, int n_chi, int n_mu1) {
  const GaussRule& rule = gauss_legendre_unit(n_chi);
  const double span = 0.5 * std::numbers::pi;
  const Eigen::Vector3d d_mu1(1.0, 0.0, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double chi = span * rule.nodes[i];
    double ring = 0.0;
    for (int j = 0; j < n_mu1; ++j) {
      const SeifertSlice sl = cone_slice(s, r, chi, kTwoPi * j / n_mu1);
      ring += sl.d_chi.dot(curvature(angle, w, sl.x) * d_mu1);
    }
    total += rule.weights[i] * span * ring * kTwoPi / n_mu1;
  }
  // Orientation -dchi^dmu1.
  return -total / kTwoPi;
}

}  // namespace

SeifertResult seifert_invariant(const SolitonParams& params, const AngleField& angle,
                                const ScalarField& w, const std::vector<MomentPoint>& poles,
                                double tol, const SphereQuadrature& quad) {
  if (!params.has_minus())
    throw InvalidParamsError("Seifert invariant S(W) is only defined for a_- != 0");
  const OrbifoldModel model = OrbifoldModel::for_params(params);
  double r = 1.0;
  for (const auto& z : poles) {
    const auto c = std::get<ConeCoords>(to_model_coords(model, z));
    r = std::min(r, 0.5 * std::hypot(c.rho1, c.rho2));
  }

  SeifertResult out;
  out.sphere_radius = r;
  out.tolerance = tol;
  out.value = seifert_quadrature(params, angle, w, r, quad.n_theta, quad.n_phi);
  out.label_offset = static_cast<double>(params.l_plus()) / params.k_plus() +
                     static_cast<double>(params.l_minus()) / *params.k_minus();
  const double shifted = out.value - out.label_offset;
  out.nearest_integer = std::round(shifted);
  out.distance = std::abs(shifted - out.nearest_integer);
  out.integral = out.distance < tol;
  return out;
}

}  // namespace gkforge
