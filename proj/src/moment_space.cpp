#include "gkforge/moment_space.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "gkforge/errors.hpp"
#include "gkforge/quadrature.hpp"

namespace gkforge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

void check_label(int k, int l, const char* which) {
  if (l < 0 || l >= std::abs(k) || std::gcd(k, l) != 1) {
    std::ostringstream msg;
    msg << "Seifert label l_" << which << " = " << l << " must satisfy 0 <= l < |k| = "
        << std::abs(k) << " and gcd(k, l) = 1";
    throw InvalidParamsError(msg.str());
  }
}

}  // namespace

SolitonParams SolitonParams::make(int k_plus, std::optional<int> k_minus, int l_plus,
                                  int l_minus, double phi_const) {
  if (k_plus == 0) throw InvalidParamsError("k_plus must be a nonzero integer (a_+ != 0)");
  check_label(k_plus, l_plus, "plus");
  if (k_minus) {
    if (*k_minus == 0)
      throw InvalidParamsError("k_minus must be nonzero when present (absent encodes a_- = 0)");
    check_label(*k_minus, l_minus, "minus");
  } else if (l_minus != 0) {
    throw InvalidParamsError("l_minus must be 0 when k_minus is absent");
  }
  if (!std::isfinite(phi_const)) throw InvalidParamsError("phi_const must be finite");
  return SolitonParams(k_plus, k_minus, l_plus, l_minus, phi_const);
}

double phi(const SolitonParams& s, const MomentPoint& x) {
  return phi(s, x.mu_plus, x.mu_minus);
}

long double phi_extended(const SolitonParams& s, const MomentPoint& x) {
  const long double a_plus = 2.0L / s.k_plus();
  const long double a_minus = s.has_minus() ? 2.0L / *s.k_minus() : 0.0L;
  return a_plus * x.mu_plus + a_minus * x.mu_minus + s.phi_const();
}

double angle_from_phi(double phi_value) {
  return static_cast<double>(-std::tanh(0.5L * phi_value));
}

double phi_from_angle(double p) { return std::log1p(-p) - std::log1p(p); }

Jet1 AngleField::angle1(const MomentPoint& x) const {
  const Jet2 a = angle(x);
  Jet1 r(a.v);
  r.d = a.d;
  return r;
}

Jet2 SolitonAngle::angle(const MomentPoint& x) const {
  const auto m = MomentJet<Jet2>::seeded(x);
  return angle_from_phi(phi(params_, m.mu_plus, m.mu_minus));
}

Jet1 SolitonAngle::angle1(const MomentPoint& x) const {
  const auto m = MomentJet<Jet1>::seeded(x);
  return angle_from_phi(phi(params_, m.mu_plus, m.mu_minus));
}

double SolitonAngle::angle_value(const MomentPoint& x) const {
  return static_cast<double>(-std::tanh(0.5L * phi_extended(params_, x)));
}

BaseMetric base_metric(AngleValue angle) {
  const double p = angle.value();
  return BaseMetric{Eigen::Vector3d(1.0 - p * p, 2.0 * (1.0 - p), 2.0 * (1.0 + p))};
}

TwoForm3 beta0(const AngleField& angle, const MomentPoint& x) {
  const Jet1 p = angle.angle1(x);
  // d/dmu2 = (d/dmu_plus + d/dmu_minus)/2, d/dmu3 = (d/dmu_plus - d/dmu_minus)/2.
  const double p2 = 0.5 * (p.d[1] + p.d[2]);
  const double p3 = 0.5 * (p.d[1] - p.d[2]);
  // p2 dmu2 - p3 dmu3 with dmu2 = dmu_plus + dmu_minus, dmu3 = dmu_plus - dmu_minus.
  const double along_plus = p2 - p3;
  const double along_minus = p2 + p3;
  TwoForm3 b = TwoForm3::Zero();
  b(0, 1) = along_plus;
  b(0, 2) = along_minus;
  b(1, 0) = -along_plus;
  b(2, 0) = -along_minus;
  return b;
}

double conformal_factor(const SolitonParams& s, const MomentPoint& x) {
  return conformal_factor(s, x.mu_plus, x.mu_minus);
}

Eigen::Matrix3d conformal_metric(const SolitonParams& s, const MomentPoint& x) {
  const double psi = conformal_factor(s, x);
  const AngleValue p(angle_from_phi(phi(s, x)));
  return psi * psi * base_metric(p).matrix();
}

ConformalFactorForms conformal_factor_forms(const SolitonParams& s, const MomentPoint& x) {
  const MomentPoint y = s.absorb_constant(x);
  const double p = angle_from_phi(phi(s, x));
  const double w0 = baseline_from_angle(s.a_plus(), s.a_minus(), p);
  return {conformal_factor(s, x),
          w0 * w0 * (1.0 - p) * std::exp(-s.a_plus() * y.mu_plus),
          w0 * w0 * (1.0 + p) * std::exp(s.a_minus() * y.mu_minus)};
}

OrbifoldModel OrbifoldModel::for_params(const SolitonParams& params,
                                        std::optional<ZTranslation> zq) {
  if (params.has_minus()) {
    if (zq) throw InvalidParamsError("a Z-quotient translation requires a_- = 0");
    return {ModelKind::Cone, params, std::nullopt};
  }
  if (zq) {
    if (zq->c == 0.0) throw InvalidParamsError("Z-quotient translation needs c != 0");
    return {ModelKind::HalfSpaceZQuotient, params, zq};
  }
  return {ModelKind::HalfSpace, params, std::nullopt};
}

ModelCoords to_model_coords(const OrbifoldModel& model, const MomentPoint& x) {
  const SolitonParams& s = model.params;
  if (model.kind == ModelKind::Cone) {
    const auto r = cone_radii(s, x.mu_plus, x.mu_minus);
    if (!(r.rho1 > 0.0) || !(r.rho2 > 0.0))
      throw DomainError("point lies on a cone locus (rho1 or rho2 vanishes)");
    return ConeCoords{wrap_angle(x.mu1), r.rho1, r.rho2};
  }
  const double rho = std::exp(0.5 * s.a_plus() * s.shifted_mu_plus(x.mu_plus));
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("point lies on the cone locus rho = 0");
  return HalfSpaceCoords{wrap_angle(x.mu1), rho, x.mu_minus};
}

MomentPoint from_model_coords(const OrbifoldModel& model, const ModelCoords& c) {
  const SolitonParams& s = model.params;
  const double unshift = s.phi_const() / s.a_plus();
  if (const auto* h = std::get_if<HalfSpaceCoords>(&c)) {
    if (!(h->rho > 0.0)) throw DomainError("rho must be positive");
    return {h->angle, 2.0 * std::log(h->rho) / s.a_plus() - unshift, h->mu_minus};
  }
  const auto& k = std::get<ConeCoords>(c);
  if (!(k.rho1 > 0.0) || !(k.rho2 > 0.0)) throw DomainError("rho1 and rho2 must be positive");
  const double ap = s.a_plus();
  const double am = s.a_minus();
  const double q = 1.0 / (am * am * k.rho2 * k.rho2 + ap * ap * k.rho1 * k.rho1);
  const double e_plus = k.rho2 * k.rho2 * q * q;
  const double e_minus = k.rho1 * k.rho1 * q * q;
  return {k.angle, std::log(e_plus) / ap - unshift, -std::log(e_minus) / am};
}

Eigen::Matrix3d half_space_metric(const SolitonParams& s, const HalfSpaceCoords& c) {
  const double r2 = c.rho * c.rho;
  const double ap = s.a_plus();
  const double f = 4.0 / (1.0 + r2);
  return Eigen::Vector3d(f * r2 / (1.0 + r2), f * 4.0 / (ap * ap), f).asDiagonal();
}

Eigen::Matrix3d cone_metric(const SolitonParams& s, const ConeCoords& c) {
  const double r1 = c.rho1 * c.rho1;
  const double r2 = c.rho2 * c.rho2;
  const double ap = s.a_plus();
  const double am = s.a_minus();
  const double f = 4.0 / (r1 + r2);
  return Eigen::Vector3d(f * r1 * r2 / (r1 + r2), f * 4.0 / (am * am), f * 4.0 / (ap * ap))
      .asDiagonal();
}

double model_radius(const OrbifoldModel& model, const MomentPoint& x) {
  const ModelCoords c = to_model_coords(model, x);
  if (const auto* h = std::get_if<HalfSpaceCoords>(&c)) return h->rho;
  const auto& k = std::get<ConeCoords>(c);
  return std::min(k.rho1, k.rho2);
}

MomentPoint moment_from_cover(const OrbifoldModel& model, const CoverPoint& c) {
  const SolitonParams& s = model.params;
  const double unshift = s.phi_const() / s.a_plus();
  const double az = std::abs(c.z);
  const double aw = std::abs(c.w);
  if (model.kind == ModelKind::Cone) {
    if (az == 0.0 || aw == 0.0) throw DomainError("cover point lies on an orbifold locus");
    const int km = *s.k_minus();
    const MomentPoint y = from_model_coords(model, ConeCoords{0.0, az, aw});
    return {km * std::arg(c.z) - s.k_plus() * std::arg(c.w), y.mu_plus, y.mu_minus};
  }
  if (az == 0.0) throw DomainError("cover point lies on the orbifold locus z = 0");
  if (aw == 0.0) throw DomainError("w must be nonzero on C x C*");
  const int kp = s.k_plus();
  return {kp * std::arg(c.z) - std::arg(c.w), kp * std::log(az) - unshift, std::log(aw)};
}

CoverPoint cover_from_moment(const OrbifoldModel& model, const MomentPoint& x) {
  const SolitonParams& s = model.params;
  if (model.kind == ModelKind::Cone) {
    const auto r = cone_radii(s, x.mu_plus, x.mu_minus);
    const int km = *s.k_minus();
    return {std::polar(r.rho1, x.mu1 / km), std::complex<double>(r.rho2, 0.0)};
  }
  const double mp = s.shifted_mu_plus(x.mu_plus);
  return {std::complex<double>(std::exp(mp / s.k_plus()), 0.0),
          std::polar(std::exp(x.mu_minus), -x.mu1)};
}

Eigen::Matrix4d flat_cover_metric(const OrbifoldModel& model, const CoverPoint& c) {
  const SolitonParams& s = model.params;
  Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
  if (model.kind == ModelKind::Cone) {
    const double km2 = std::pow(*s.k_minus(), 2);
    const double kp2 = std::pow(s.k_plus(), 2);
    g.diagonal() << km2, km2, kp2, kp2;
    return g;
  }
  const double aw2 = std::norm(c.w);
  if (aw2 == 0.0) throw DomainError("w must be nonzero on C x C*");
  const double kp2 = std::pow(s.k_plus(), 2);
  g.diagonal() << kp2, kp2, 1.0 / aw2, 1.0 / aw2;
  return g;
}

double cone_circle_ratio(int k_plus, double rho) {
  if (!(rho > 0.0)) throw DomainError("circle radius parameter must be positive");
  if (k_plus == 0) throw InvalidParamsError("k_plus must be nonzero");
  const double ap = 2.0 / k_plus;
  const auto h_at = [&](double r) {
    const double mu_plus = 2.0 * std::log(r) / ap;
    return base_metric(AngleValue(angle_from_phi(ap * mu_plus)));
  };
  // Radial arc length: integrate sqrt(h_{++}) |dmu_+/drho| from the locus out to rho.
  const GaussRule& rule = gauss_legendre_unit(32);
  double radius = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double r = rho * rule.nodes[i];
    const double speed = std::sqrt(h_at(r).diagonal[1]) * 2.0 / (std::abs(ap) * r);
    radius += rule.weights[i] * rho * speed;
  }
  const double circumference = kTwoPi * std::sqrt(h_at(rho).diagonal[0]);
  return circumference / radius;
}

}  // namespace gkforge
