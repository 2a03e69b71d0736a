#include "gkforge/examples.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "gkforge/errors.hpp"
#include "gkforge/forms.hpp"

namespace gkforge::examples {

namespace {

using Vec4 = Eigen::Vector4d;
using CVec4 = Eigen::Vector4cd;
constexpr std::complex<double> kI{0.0, 1.0};

// Holomorphic coordinate differentials on the (x1, y1, x2, y2) chart.
CVec4 dw1() { return {1.0, kI, 0.0, 0.0}; }
CVec4 dw2() { return {0.0, 0.0, 1.0, kI}; }

double log_sum_exp2(double x1, double x2) {
  const double hi = std::max(2 * x1, 2 * x2);
  return hi + std::log1p(std::exp(-std::abs(2 * x1 - 2 * x2)));
}

}  // namespace

// ---------------------------------------------------------------- standard Hopf

MomentPoint StandardHopf::moment(const Vec4& c) const {
  const double log_e = log_sum_exp2(c[0], c[2]);
  return MomentPoint::from_mu123(c[1] - c[3], c[0] - c[2], c[0] + c[2] - 2.0 * log_e);
}

double StandardHopf::angle(const Vec4& c) const { return -std::tanh(c[0] - c[2]); }

double StandardHopf::w(const Vec4& c) const {
  const Vec4 x = generator();
  return 1.0 / x.dot(metric(c) * x);
}

Eigen::Matrix4d StandardHopf::metric(const Vec4& c) const {
  const double log_e = log_sum_exp2(c[0], c[2]);
  const double s1 = std::exp(2 * c[0] - log_e);
  const double s2 = std::exp(2 * c[2] - log_e);
  return Eigen::Vector4d(s1, s1, s2, s2).asDiagonal();
}

Vec4 StandardHopf::lee_form(const Vec4& c) const {
  // omega is the flat form divided by |z1|^2 + |z2|^2, so theta = -d log of that sum.
  const double log_e = log_sum_exp2(c[0], c[2]);
  return {-2.0 * std::exp(2 * c[0] - log_e), 0.0, -2.0 * std::exp(2 * c[2] - log_e), 0.0};
}

PointFields StandardHopf::fields(const Vec4& c) const {
  PointFields f;
  f.g = metric(c);
  f.I << 0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0;
  f.hol_i = wedge(dw1(), dw2());
  const double log_e = log_sum_exp2(c[0], c[2]);
  const CVec4 dlog(2.0 * std::exp(2 * c[0] - log_e), 0.0, 2.0 * std::exp(2 * c[2] - log_e), 0.0);
  const CVec4 first = dlog + CVec4(0.0, 0.0, -1.0, kI);
  const CVec4 second = dlog + CVec4(-1.0, -kI, 0.0, 0.0);
  f.hol_j = wedge(first, second);
  f.J = complex_structure_from_form(f.hol_j);
  f.torsion = -1.0 * hodge_star_1(f.g, lee_form(c), 1.0);
  f.potential = 0.0;
  return f;
}

ChartFactory StandardHopf::charts() const {
  return [](const Vec4&) -> ChartField {
    return [](const Vec4& y) { return StandardHopf{}.fields(y); };
  };
}

SolitonParams StandardHopf::ansatz_params() { return SolitonParams::make(1, 1); }

// ---------------------------------------------------------------- diagonal Hopf

void DiagonalHopfParams::validate() const {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidParamsError("diagonal Hopf needs a, b > 0");
  if (m <= 0 || n <= 0) throw InvalidParamsError("diagonal Hopf needs positive weights m, n");
  if (std::gcd(m, n) != 1) throw InvalidParamsError("diagonal Hopf weights m, n must be coprime");
  const double target = static_cast<double>(m * m) / static_cast<double>(n * n);
  if (std::abs(a / b - target) > 1e-12 * target)
    throw InvalidParamsError("diagonal Hopf circle action needs a/b = m^2/n^2");
}

SolitonProfile::SolitonProfile(double ratio, double phi_at_zero, double tolerance)
    : ratio_(ratio), phi0_(phi_at_zero), tol_(tolerance) {
  if (!(ratio > 0.0)) throw InvalidParamsError("profile ratio a/b must be positive");
  if (!(tolerance > 0.0)) throw InvalidParamsError("profile tolerance must be positive");
}

ProfileValue SolitonProfile::operator()(double u) const {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 2>;  // (log((1-p)/(1+p)), chi)
  const double r = ratio_;
  const auto rhs = [r](const State& s, State& ds, double) {
    const double p = -std::tanh(0.5 * s[0]);
    ds[0] = 0.5 * (1.0 - r) * p + 0.5 * (1.0 + r);
    ds[1] = p;
  };
  State s{phi0_, 0.0};
  if (u != 0.0) {
    const double dt = std::copysign(std::min(0.05, std::abs(u)), u);
    odeint::integrate_adaptive(
        odeint::make_controlled(tol_, tol_, odeint::runge_kutta_dopri5<State>()), rhs, s, 0.0, u,
        dt);
  }
  return {-std::tanh(0.5 * s[0]), s[1]};
}

ProfileValue TanhProfile::operator()(double u) const {
  const double t = scale_ * u;
  // log cosh t, stable for large |t|
  const double log_cosh = std::abs(t) + std::log1p(std::exp(-2.0 * std::abs(t))) - std::log(2.0);
  return {std::tanh(t), log_cosh / scale_};
}

DiagonalHopf::DiagonalHopf(DiagonalHopfParams params, std::shared_ptr<const Profile> profile)
    : params_(params), profile_(std::move(profile)) {
  params_.validate();
  if (!profile_) throw InvalidParamsError("diagonal Hopf needs a profile");
}

double DiagonalHopf::argument(const Vec4& c) const {
  return 2.0 * (c[0] / params_.ratio() - c[2]);
}

MomentPoint DiagonalHopf::moment(const Vec4& c) const {
  const double r = params_.ratio();
  const double m = params_.m;
  const double n = params_.n;
  const double chi = (*profile_)(argument(c)).chi;
  const double mu1 = n * c[1] - m * c[3];
  const double mu2 = n * c[0] - m * c[2];
  const double mu3 = -m * (c[0] / r + 0.5 * chi) - n * (r * c[2] + 0.5 * r * chi);
  return MomentPoint::from_mu123(mu1, mu2, mu3);
}

double DiagonalHopf::profile_angle(const Vec4& c) const { return (*profile_)(argument(c)).p; }

Vec4 DiagonalHopf::generator() const { return {0.0, double(params_.m), 0.0, double(params_.n)}; }

Eigen::Matrix4d DiagonalHopf::metric(const Vec4& c) const {
  const double r = params_.ratio();
  const double p = profile_angle(c);
  const double s1 = (1.0 + p) / (2.0 * r);
  const double s2 = r * (1.0 - p) / 2.0;
  return Eigen::Vector4d(s1, s1, s2, s2).asDiagonal();
}

double DiagonalHopf::w(const Vec4& c) const {
  const Vec4 x = generator();
  return 1.0 / x.dot(metric(c) * x);
}

Eigen::Matrix4cd DiagonalHopf::holomorphic_i() const { return wedge(dw1(), dw2()); }

Eigen::Matrix4cd DiagonalHopf::holomorphic_j(const Vec4& c) const {
  const double r = params_.ratio();
  const double p = profile_angle(c);
  const CVec4 first = dw1() - r * dw2().conjugate();
  const CVec4 second = (1.0 + p) / (2.0 * r) * dw1().conjugate() + (1.0 - p) / 2.0 * dw2();
  return wedge(first, second);
}

double DiagonalHopf::phi_linearity_residual(const std::vector<Vec4>& points) const {
  if (points.empty()) throw InvalidParamsError("phi linearity needs sample points");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Vec4& c : points) {
    const double p = profile_angle(c);
    const MomentPoint mu = moment(c);
    const double offset = std::log((1.0 - p) / (1.0 + p)) -
                          (2.0 / params_.n * mu.mu_plus + 2.0 / params_.m * mu.mu_minus);
    lo = std::min(lo, offset);
    hi = std::max(hi, offset);
  }
  return hi - lo;
}

// ---------------------------------------------------------------- Gibbons-Hawking

GibbonsHawking gibbons_hawking(double mass, std::vector<MomentPoint> centres) {
  if (!(mass >= 0.0) || (mass == 0.0 && centres.empty()))
    throw InvalidParamsError("Gibbons-Hawking potential must be positive: need mass > 0 or a centre");
  auto w = std::make_shared<FunctionField>([mass, centres](const MomentPoint& x) {
    const auto m = MomentJet<Jet2>::seeded(x);
    Jet2 out = mass;
    for (const auto& z : centres) {
      const Jet2 a = m.mu1 - z.mu1;
      const Jet2 b = m.mu_plus - z.mu_plus;
      const Jet2 c = m.mu_minus - z.mu_minus;
      // flat distance in (mu1, mu2, mu3) written in mu_+, mu_-
      const Jet2 r2 = a * a + 2.0 * b * b + 2.0 * c * c;
      if (r2.v == 0.0) throw PoleError("Gibbons-Hawking potential evaluated at a centre");
      out = out + 0.5 * reciprocal(sqrt(r2));
    }
    return out;
  });
  return {std::make_shared<ConstantAngle>(0.0), std::move(w), std::move(centres), mass};
}

// ---------------------------------------------------------------- LeBrun

namespace {

template <class T>
T lebrun_angle(const T& mu_minus) {
  using std::exp;
  if (value_of(mu_minus) >= 0.0) throw DomainError("LeBrun data live on mu_- < 0");
  return 2.0 * exp(2.0 * mu_minus) - 1.0;
}

struct HalfSpace {
  template <class T>
  static std::array<T, 3> point(const T& mu1, const T& mu_plus, const T& mu_minus) {
    using std::cos, std::exp, std::expm1, std::sin, std::sqrt;
    if (value_of(mu_minus) >= 0.0) throw DomainError("LeBrun data live on mu_- < 0");
    const T radius = exp(mu_plus);
    const T planar = radius * exp(mu_minus);
    const T height = radius * sqrt(-1.0 * expm1(2.0 * mu_minus));
    return {planar * cos(mu1), planar * sin(mu1), height};
  }
};

template <class T>
T green_term(const T& x, const T& y, const T& z, double c) {
  using std::sqrt;
  const T dist2 = x * x + y * y + (z - c) * (z - c);
  const T chm1 = dist2 / (2.0 * c * z);  // cosh d - 1
  const T s = sqrt(chm1 * (chm1 + 2.0));   // sinh d
  return 0.5 * reciprocal(s * (chm1 + 1.0 + s));
}

// V = 1 + sum over j of the Green's function at height lambda^j; both tails are geometric
// with ratio lambda^-2 once the term decreases.
template <class T>
T lebrun_sum(const T& x, const T& y, const T& z, double lambda, double tol, int max_terms,
             double* tail) {
  T total = 1.0;
  total = total + green_term(x, y, z, 1.0);
  const double q = 1.0 / (lambda * lambda);
  double tail_estimate = 0.0;
  for (const int dir : {1, -1}) {
    double previous = value_of(green_term(x, y, z, 1.0));
    bool done = false;
    for (int j = 1; j <= max_terms; ++j) {
      const double c = std::pow(lambda, dir * j);
      const T term = green_term(x, y, z, c);
      total = total + term;
      const double v = value_of(term);
      if (v < previous && v < tol * (1.0 - q)) {
        tail_estimate += v * q / (1.0 - q);
        done = true;
        break;
      }
      previous = v;
    }
    if (!done) throw ConvergenceError("LeBrun Green's sum did not reach its tail tolerance");
  }
  if (tail) *tail = tail_estimate;
  return total;
}

}  // namespace

Jet2 LeBrunAngle::angle(const MomentPoint& x) const {
  return lebrun_angle(MomentJet<Jet2>::seeded(x).mu_minus);
}

Jet1 LeBrunAngle::angle1(const MomentPoint& x) const {
  return lebrun_angle(MomentJet<Jet1>::seeded(x).mu_minus);
}

double LeBrunAngle::angle_value(const MomentPoint& x) const { return lebrun_angle(x.mu_minus); }

LeBrunInoue::LeBrunInoue(double lambda, double tail_tolerance, int max_terms)
    : lambda_(lambda), tail_tol_(tail_tolerance), max_terms_(max_terms) {
  if (!(lambda > 1.0)) throw InvalidParamsError("LeBrun data need lambda > 1");
  if (!(tail_tolerance > 0.0) || max_terms < 1)
    throw InvalidParamsError("LeBrun series needs a positive tolerance and term budget");
  angle_ = std::make_shared<LeBrunAngle>();
  w_ = std::make_shared<FunctionField>(
      [lambda, tail_tolerance, max_terms](const MomentPoint& x) {
        const auto m = MomentJet<Jet2>::seeded(x);
        const auto q = HalfSpace::point(m.mu1, m.mu_plus, m.mu_minus);
        const Jet2 v = lebrun_sum(q[0], q[1], q[2], lambda, tail_tolerance, max_terms, nullptr);
        // (x^2 + y^2 + z^2) / z^2 = 1 / (1 - exp(2 mu_-))
        return v * reciprocal(-1.0 * expm1(2.0 * m.mu_minus));
      });
}

Eigen::Vector3d LeBrunInoue::to_half_space(const MomentPoint& x) {
  const auto q = HalfSpace::point(x.mu1, x.mu_plus, x.mu_minus);
  return {q[0], q[1], q[2]};
}

MomentPoint LeBrunInoue::from_half_space(const Eigen::Vector3d& q) {
  const double planar2 = q[0] * q[0] + q[1] * q[1];
  if (!(q[2] > 0.0) || planar2 == 0.0)
    throw DomainError("LeBrun dictionary needs z > 0 off the vertical axis");
  const double r2 = planar2 + q[2] * q[2];
  return {std::atan2(q[1], q[0]), 0.5 * std::log(r2), 0.5 * (std::log(planar2) - std::log(r2))};
}

double LeBrunInoue::green(const Eigen::Vector3d& q, const Eigen::Vector3d& pole) {
  if (!(q[2] > 0.0) || !(pole[2] > 0.0)) throw DomainError("hyperbolic space needs z > 0");
  return green_term(q[0] - pole[0], q[1] - pole[1], q[2], pole[2]);
}

double LeBrunInoue::potential(const Eigen::Vector3d& q) const {
  if (!(q[2] > 0.0)) throw DomainError("hyperbolic space needs z > 0");
  return lebrun_sum(q[0], q[1], q[2], lambda_, tail_tol_, max_terms_, nullptr);
}

double LeBrunInoue::truncation_bound(const Eigen::Vector3d& q) const {
  double tail = 0.0;
  lebrun_sum(q[0], q[1], q[2], lambda_, tail_tol_, max_terms_, &tail);
  return tail;
}

double LeBrunInoue::hyperbolic_laplacian_fd(const Eigen::Vector3d& q, const FdScheme& scheme) const {
  const VectorFunction v = [this](const Vec4& y) {
    return Eigen::VectorXd::Constant(1, potential(y.tail<3>()));
  };
  const DerivativeSet d = differentiate(v, Vec4(0.0, q[0], q[1], q[2]), scheme, kFibreInvariant);
  const double z = q[2];
  return z * z * (d.d2[1][1][0] + d.d2[2][2][0] + d.d2[3][3][0]) - z * d.d1[3][0];
}

Eigen::Matrix3d LeBrunInoue::pulled_back_metric(const MomentPoint& x) const {
  const auto m = MomentJet<Jet1>::seeded(x);
  const auto q = HalfSpace::point(m.mu1, m.mu_plus, m.mu_minus);
  Eigen::Matrix3d jac;
  for (int i = 0; i < 3; ++i) jac.row(i) = q[i].d.transpose();
  const double z = q[2].v;
  const double r2 = q[0].v * q[0].v + q[1].v * q[1].v + z * z;
  const double conformal = std::pow(z * z / r2, 2) / (z * z);
  return conformal * jac.transpose() * jac;
}

}  // namespace gkforge::examples
