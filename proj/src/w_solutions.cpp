#include "gkforge/w_solutions.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "gkforge/errors.hpp"

namespace gkforge {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// W0 = (1 + e^Phi) / (2 (a_+^2 + a_-^2 e^Phi)), rewritten in e^-Phi for Phi > 0.
double baseline_value(const SolitonParams& s, const MomentPoint& x) {
  const long double ph = phi_extended(s, x);
  const long double ap2 = 4.0L / (static_cast<long double>(s.k_plus()) * s.k_plus());
  const long double am2 =
      s.has_minus() ? 4.0L / (static_cast<long double>(*s.k_minus()) * *s.k_minus()) : 0.0L;
  if (ph > 0.0L) {
    const long double e = std::exp(-ph);
    return static_cast<double>((1.0L + e) / (2.0L * (ap2 * e + am2)));
  }
  const long double e = std::exp(ph);
  return static_cast<double>((1.0L + e) / (2.0L * (ap2 + am2 * e)));
}

template <class T>
T baseline_at(const SolitonParams& s, const MomentJet<T>& m) {
  const T p = angle_from_phi(phi(s, m.mu_plus, m.mu_minus));
  return baseline_from_angle(s.a_plus(), s.a_minus(), p);
}

template <class T>
T anomalous_at(const SolitonParams& s, const MomentJet<T>& m) {
  using std::exp;
  const double kp = s.k_plus();
  const double km = *s.k_minus();
  const T mp = s.shifted_mu_plus(m.mu_plus);
  return kp * kp * exp((2.0 / kp) * mp) + km * km * exp((-2.0 / km) * m.mu_minus);
}

// Sum over n of 1/(a2 + (c + 2 pi n)^2) = sinh a / (2a (cosh a - cos c)), a = sqrt(a2).
template <class T>
T lattice_kernel(const T& a2, const T& c) {
  using std::cos;
  using std::exp;
  using std::sqrt;
  using std::sin;
  if (value_of(a2) < 1.0) {
    // sinh(a)/a and (cosh(a) - 1)/a2 are entire in a2; the series avoids sqrt at a2 = 0, and
    // writing cosh a - cos c = (cosh a - 1) + 2 sin^2(c/2) avoids cancellation near the pole.
    T sinhc(1.0);
    T cosh_excess(0.5);
    T term(1.0);
    double factorial = 2.0;  // (2j)!
    for (int j = 1; j <= 12; ++j) {
      term = term * a2;
      sinhc += term * (1.0 / (factorial * (2 * j + 1)));
      factorial *= (2 * j + 1) * (2 * j + 2);
      cosh_excess += term * (1.0 / factorial);
    }
    const T half_sin = sin(0.5 * c);
    return sinhc / (2.0 * (a2 * cosh_excess + 2.0 * half_sin * half_sin));
  }
  const T a = sqrt(a2);
  const T e = exp(-a);
  return (1.0 - e * e) / (2.0 * a * (1.0 - 2.0 * e * cos(c) + e * e));
}

template <class T>
T truncated_lattice_kernel(const T& a2, const T& c, int images) {
  T sum(0.0);
  for (int n = -images; n <= images; ++n) {
    const T shifted = c + kTwoPi * n;
    sum += 1.0 / (a2 + shifted * shifted);
  }
  return sum;
}

}  // namespace

Jet1 FunctionField::jet1(const MomentPoint& x) const {
  const Jet2 j = f_(x);
  Jet1 r(j.v);
  r.d = j.d;
  return r;
}

double BaselineField::value(const MomentPoint& x) const {
  return baseline_value(params_, x);
}
Jet1 BaselineField::jet1(const MomentPoint& x) const {
  return baseline_at(params_, MomentJet<Jet1>::seeded(x));
}
Jet2 BaselineField::jet2(const MomentPoint& x) const {
  return baseline_at(params_, MomentJet<Jet2>::seeded(x));
}

double baseline(const SolitonParams& params, const MomentPoint& x) {
  return BaselineField(params).value(x);
}

AnomalousField::AnomalousField(SolitonParams params) : params_(params) {
  if (!params_.has_minus())
    throw InvalidParamsError("the anomalous solution G0 exists only when a_- != 0");
}
double AnomalousField::value(const MomentPoint& x) const {
  return anomalous_at(params_, MomentJet<double>::seeded(x));
}
Jet1 AnomalousField::jet1(const MomentPoint& x) const {
  return anomalous_at(params_, MomentJet<Jet1>::seeded(x));
}
Jet2 AnomalousField::jet2(const MomentPoint& x) const {
  return anomalous_at(params_, MomentJet<Jet2>::seeded(x));
}

double anomalous(const SolitonParams& params, const MomentPoint& x) {
  return AnomalousField(params).value(x);
}

double derive_flat_kernel_constant(double sphere_radius, int nodes) {
  // Outward flux of grad(1/r^2) through the sphere of radius R in R^4, with the normal
  // derivative taken by a centered difference and the area element sin^2(chi) sin(theta) R^3.
  const auto kernel = [](const Eigen::Vector4d& y) { return 1.0 / y.squaredNorm(); };
  const GaussRule& rule = gauss_legendre_unit(nodes);
  const double dr = 1e-4 * sphere_radius;
  double flux = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double chi = kPi * rule.nodes[i];
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double theta = kPi * rule.nodes[j];
      for (int k = 0; k < 2 * nodes; ++k) {
        const double phi_angle = kTwoPi * k / (2 * nodes);
        const Eigen::Vector4d n(std::cos(chi), std::sin(chi) * std::cos(theta),
                                std::sin(chi) * std::sin(theta) * std::cos(phi_angle),
                                std::sin(chi) * std::sin(theta) * std::sin(phi_angle));
        const double dn =
            (kernel((sphere_radius + dr) * n) - kernel((sphere_radius - dr) * n)) / (2.0 * dr);
        const double area = std::pow(sphere_radius, 3) * std::sin(chi) * std::sin(chi) *
                            std::sin(theta);
        flux += rule.weights[i] * kPi * rule.weights[j] * kPi * (kTwoPi / (2 * nodes)) * area * dn;
      }
    }
  }
  // Laplacian(kappa/r^2) = -2 pi delta  <=>  kappa * flux = -2 pi.
  return -kTwoPi / flux;
}

double flat_kernel_constant() {
  static const double kappa = derive_flat_kernel_constant(1e-2, 24);
  return kappa;
}

// ------------------------------------------------------------------ Green's functions

struct GreenFunction::Impl {
  GreenOptions options;
  bool cone = false;
  // Reduced cover data: k_plus' = k_plus/d, k_minus' = k_minus/d, d = gcd (cones only).
  int kp = 1;
  int km = 1;
  int d = 1;
  double normalization = 0.0;  // C * kappa
  MomentPoint pole;            // phi_const absorbed
  double phi_shift = 0.0;      // added to mu_plus of evaluation points
  int images = 0;
  double tail = 0.0;

  // a_- = 0: cover C x C* in log coordinates; Z = k_+ z, sigma = log|w|, phi = arg w.
  double pole_radius = 0.0;

  // a_- != 0 (per reduced copy j): lifted radii of the shifted pole.
  struct ConePole {
    double a1, a2, mu1;
  };
  std::vector<ConePole> cone_poles;

  template <class T>
  T eval(const MomentPoint& x) const {
    MomentJet<T> m = MomentJet<T>::seeded(x);
    m.mu_plus = m.mu_plus + phi_shift;
    if (std::abs(x.mu1 - pole.mu1) < 1e-13 &&
        std::abs(x.mu_plus + phi_shift - pole.mu_plus) < 1e-13 &&
        std::abs(x.mu_minus - pole.mu_minus) < 1e-13)
      throw PoleError("Green's function evaluated at its pole");
    const T g = cone ? eval_cone(m) : eval_half_space(m);
    if (!std::isfinite(value_of(g))) throw PoleError("Green's function evaluated on the pole orbit");
    return g;
  }

  template <class T>
  T eval_half_space(const MomentJet<T>& m) const {
    using std::exp;
    const double akp = std::abs(kp);
    const T rx = akp * exp(m.mu_plus * (1.0 / kp));
    // a2 = (Rx - Rz)^2 + 4 Rx Rz sin^2(theta/2) + dsigma^2, free of cancellation near the pole.
    const T dsigma = m.mu_minus - pole.mu_minus;
    const T dr = rx - pole_radius;
    const T base = dr * dr + dsigma * dsigma;
    const T cross = (4.0 * pole_radius) * rx;
    const T dmu1 = m.mu1 - pole.mu1;
    const auto integrand = [&](double theta) -> T {
      const double half = std::sin(0.5 * theta);
      const T a2 = base + cross * (half * half);
      // Reduce the lattice offset into [-pi, pi) so the truncated sum is centred.
      T c = kp * theta - dmu1;
      c = c - kTwoPi * std::floor((value_of(c) + kPi) / kTwoPi);
      if (options.mode == GreenMode::ImageSum) return truncated_lattice_kernel(a2, c, images);
      return lattice_kernel(a2, c);
    };
    return normalization * periodic_integral<T>(integrand, options.quadrature);
  }

  template <class T>
  T eval_cone(const MomentJet<T>& m) const {
    // mu' = mu / d on the reduced (coprime) cover.
    const double scale = 1.0 / d;
    const T mp = m.mu_plus * scale;
    const T mm = m.mu_minus * scale;
    const T mu1 = m.mu1 * scale;
    const auto radii = cone_radii(2.0 / kp, 2.0 / km, mp, mm);
    const T a1 = std::abs(km) * radii.rho1;
    const T a2 = std::abs(kp) * radii.rho2;
    T total(0.0);
    for (const ConePole& z : cone_poles) {
      const T d1 = a1 - z.a1;
      const T d2 = a2 - z.a2;
      const T base = d1 * d1 + d2 * d2;
      const T c1 = (4.0 * z.a1) * a1;
      const T c2 = (4.0 * z.a2) * a2;
      const T shift = (mu1 - z.mu1) * (1.0 / km);
      const auto integrand = [&](double theta) -> T {
        using std::sin;
        const T s1 = sin(0.5 * (kp * theta + shift));
        const double s2 = std::sin(0.5 * km * theta);
        return 1.0 / (base + c1 * (s1 * s1) + c2 * (s2 * s2));
      };
      total += periodic_integral<T>(integrand, options.quadrature);
    }
    return normalization * total;
  }
};

GreenFunction::GreenFunction(const OrbifoldModel& model, const MomentPoint& pole,
                             GreenOptions options)
    : pole_(pole), impl_(std::make_unique<Impl>()) {
  const SolitonParams& s = model.params;
  Impl& im = *impl_;
  im.options = options;
  im.phi_shift = s.phi_const() / s.a_plus();
  im.pole = s.absorb_constant(pole);
  const double kappa = flat_kernel_constant();

  if (model.kind == ModelKind::HalfSpaceZQuotient)
    throw InvalidParamsError(
        "Green's functions are not available on the Z-quotient model: the image sum over the "
        "deck translation diverges; only W = lambda W0 is admissible there");

  if (model.kind == ModelKind::Cone) {
    im.cone = true;
    const int kp = s.k_plus();
    const int km = *s.k_minus();
    im.d = std::gcd(std::abs(kp), std::abs(km));
    im.kp = kp / im.d;
    im.km = km / im.d;
    // C = |k_+ k_-| on the coprime cover, fixed by G ~ 1/(2 d_h-tilde) at the pole;
    // the ZZ_d average carries d^{-5} (d^{-4} from rescaling the kernel, 1/d from the mean).
    im.normalization = std::abs(im.kp * im.km) * kappa / std::pow(im.d, 5);
    for (int j = 0; j < im.d; ++j) {
      const MomentPoint zr{(im.pole.mu1 + kTwoPi * j) / im.d, im.pole.mu_plus / im.d,
                           im.pole.mu_minus / im.d};
      const auto r = cone_radii(2.0 / im.kp, 2.0 / im.km, zr.mu_plus, zr.mu_minus);
      im.cone_poles.push_back({std::abs(im.km) * r.rho1, std::abs(im.kp) * r.rho2, zr.mu1});
    }
  } else {
    im.kp = s.k_plus();
    im.pole_radius = std::abs(im.kp) * std::exp(im.pole.mu_plus / im.kp);
    im.normalization = 16.0 / std::pow(std::abs(im.kp), 3) * kappa;
    if (options.mode == GreenMode::ImageSum) {
      // With |c| <= pi, (c + 2 pi n)^2 >= (2 pi (|n| - 1/2))^2 for |n| > K, so the omitted tail
      // of each kernel is at most 2/(4 pi^2 (K - 1/2)); integrating over theta adds 2 pi.
      const auto bound = [&](int k) {
        return im.normalization * kTwoPi * 2.0 / (4.0 * kPi * kPi * (k - 0.5));
      };
      int k = options.images;
      if (k <= 0) {
        const double needed = im.normalization * kTwoPi * 2.0 /
                                  (4.0 * kPi * kPi * options.tail_tolerance) + 0.5;
        if (needed > options.max_images) {
          std::ostringstream msg;
          msg << "image sum needs K = " << needed << " > max_images = " << options.max_images
              << " to certify tail tolerance " << options.tail_tolerance;
          throw ConvergenceError(msg.str());
        }
        k = static_cast<int>(std::ceil(needed));
      }
      im.images = k;
      im.tail = bound(k);
      if (im.tail > options.tail_tolerance) {
        std::ostringstream msg;
        msg << "image sum with K = " << k << " has tail bound " << im.tail
            << " above the requested " << options.tail_tolerance;
        throw ConvergenceError(msg.str());
      }
    }
  }
}

GreenFunction::~GreenFunction() = default;

GreenFunction::GreenFunction(const GreenFunction& other)
    : pole_(other.pole_), impl_(std::make_unique<Impl>(*other.impl_)) {}

double GreenFunction::value(const MomentPoint& x) const { return impl_->eval<double>(x); }
Jet1 GreenFunction::jet1(const MomentPoint& x) const { return impl_->eval<Jet1>(x); }
Jet2 GreenFunction::jet2(const MomentPoint& x) const { return impl_->eval<Jet2>(x); }
double GreenFunction::tail_bound() const { return impl_->tail; }

double green(const OrbifoldModel& model, const MomentPoint& pole, const MomentPoint& x,
             const GreenOptions& options) {
  return GreenFunction(model, pole, options).value(x);
}

double pole_weight(const SolitonParams& params, const MomentPoint& z) {
  return conformal_factor(params, z) / baseline(params, z);
}

// ------------------------------------------------------------------ superposition

template <class T>
T ScalarSolution::evaluate(const MomentPoint& x) const {
  const SolitonParams& s = model_.params;
  const auto m = MomentJet<T>::seeded(x);
  T v(lambda_);
  if (lambda0_ != 0.0) v += lambda0_ * anomalous_at(s, m);
  for (std::size_t i = 0; i < poles_.size(); ++i) {
    if constexpr (std::is_same_v<T, double>)
      v += poles_[i].weight * greens_[i].value(x);
    else if constexpr (T::order == 1)
      v += poles_[i].weight * greens_[i].jet1(x);
    else
      v += poles_[i].weight * greens_[i].jet2(x);
  }
  if constexpr (std::is_same_v<T, double>)
    return baseline_value(s, x) * v;
  else
    return baseline_at(s, m) * v;
}

double ScalarSolution::value(const MomentPoint& x) const { return evaluate<double>(x); }
Jet1 ScalarSolution::jet1(const MomentPoint& x) const { return evaluate<Jet1>(x); }
Jet2 ScalarSolution::jet2(const MomentPoint& x) const { return evaluate<Jet2>(x); }

double ScalarSolution::ratio(const MomentPoint& x) const {
  return value(x) / baseline(model_.params, x);
}

ScalarSolution superpose(const OrbifoldModel& model, const SuperpositionSpec& spec) {
  const SolitonParams& s = model.params;
  if (!(spec.lambda >= 0.0) || !(spec.lambda0 >= 0.0))
    throw InvalidParamsError("weights lambda and lambda0 must be nonnegative");
  if (spec.lambda0 > 0.0 && !s.has_minus())
    throw InvalidParamsError("lambda0 > 0 needs a_- != 0 (G0 is defined only then)");
  if (model.kind == ModelKind::HalfSpaceZQuotient && (!spec.poles.empty() || spec.lambda0 > 0.0))
    throw InvalidParamsError("on the Z-quotient model only W = lambda W0 is admissible");

  ScalarSolution sol(model);
  sol.lambda_ = spec.lambda;
  sol.lambda0_ = spec.lambda0;
  for (const PoleTerm& term : spec.poles) {
    const double radius = model_radius(model, term.location);
    if (!(radius > spec.pole_margin)) {
      std::ostringstream msg;
      msg << "pole at (" << term.location.mu1 << ", " << term.location.mu_plus << ", "
          << term.location.mu_minus << ") has model radius " << radius
          << " within the margin " << spec.pole_margin
          << " of the orbifold locus; poles must lie in the smooth locus";
      throw DomainError(msg.str());
    }
    const double w = term.weight.value_or(pole_weight(s, term.location));
    if (!(w > 0.0)) throw InvalidParamsError("pole weights must be positive");
    sol.poles_.push_back({term.location, w});
    sol.greens_.emplace_back(model, term.location, spec.green);
  }
  if (spec.lambda == 0.0 && spec.lambda0 == 0.0 && sol.poles_.empty())
    throw InvalidParamsError("weights must not all vanish (W must be positive)");
  if (s.has_minus() && spec.lambda == 0.0) {
    const std::string msg =
        "lambda = 0 with a_- != 0 gives an incomplete metric; a positive constant term is "
        "required for completeness";
    if (!spec.allow_incomplete) throw CompletenessError(msg);
    sol.warnings_.push_back(msg);
  }
  return sol;
}

double w_equation_residual(const AngleField& angle, const ScalarField& w, const MomentPoint& x) {
  const Jet2 p = angle.angle(x);
  const Jet2 f = w.jet2(x);
  const auto second = [&](const Jet2& a, int i) { return a.h(i, i); };
  const Jet2 plus = (1.0 + p) * f;
  const Jet2 minus = (1.0 - p) * f;
  return second(f, 0) + 0.5 * second(plus, 1) + 0.5 * second(minus, 2);
}

}  // namespace gkforge
