#include "gkforge/diffops.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <mutex>
#include <random>

#include "gkforge/errors.hpp"
#include "gkforge/parallel.hpp"

namespace gkforge {

void FdScheme::validate() const {
  if (order != 2 && order != 4) throw InvalidParamsError("FD order must be 2 or 4");
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidParamsError("FD step must be positive");
  if (max_shrinks < 0) throw InvalidParamsError("max_shrinks must be non-negative");
}

namespace {

using Offset = std::array<int, 4>;
using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

struct Weights {
  std::vector<std::pair<int, double>> first;   // antisymmetric pairs, positive offsets only
  std::vector<std::pair<int, double>> second;  // symmetric, offsets >= 0
};

Weights weights_for(int order) {
  if (order == 2) return {{{1, 0.5}}, {{0, -2.0}, {1, 1.0}}};
  return {{{1, 8.0 / 12.0}, {2, -1.0 / 12.0}},
          {{0, -30.0 / 12.0}, {1, 16.0 / 12.0}, {2, -1.0 / 12.0}}};
}

std::vector<Offset> stencil_offsets(int order, const DirectionMask& active) {
  const int reach = order == 2 ? 1 : 2;
  std::vector<Offset> out{{0, 0, 0, 0}};
  for (int i = 0; i < 4; ++i) {
    if (!active[i]) continue;
    for (int s = 1; s <= reach; ++s) {
      Offset a{};
      a[i] = s;
      out.push_back(a);
      a[i] = -s;
      out.push_back(a);
    }
    for (int j = i + 1; j < 4; ++j) {
      if (!active[j]) continue;
      for (int a = -reach; a <= reach; ++a)
        for (int b = -reach; b <= reach; ++b) {
          if (a == 0 || b == 0) continue;
          Offset o{};
          o[i] = a;
          o[j] = b;
          out.push_back(o);
        }
    }
  }
  return out;
}

Vec4 displaced(const Vec4& x, const Offset& o, double h) {
  return x + h * Vec4(o[0], o[1], o[2], o[3]);
}

DerivativeSet single_step(const VectorFunction& f, const Vec4& x, int order, double h,
                          const DirectionMask& active) {
  const Weights w = weights_for(order);
  std::map<Offset, Eigen::VectorXd> values;
  for (const Offset& o : stencil_offsets(order, active)) {
    try {
      values.emplace(o, f(displaced(x, o, h)));
    } catch (const DomainError& e) {
      throw StencilError(std::string("stencil point outside the domain: ") + e.what());
    } catch (const DegenerateAngleError& e) {
      throw StencilError(std::string("stencil point at a degenerate angle: ") + e.what());
    }
  }
  const Eigen::VectorXd& centre = values.at({0, 0, 0, 0});
  const Eigen::Index n = centre.size();
  DerivativeSet d;
  d.value = centre;
  d.step = h;
  for (int i = 0; i < 4; ++i) {
    d.d1[i] = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < 4; ++j) d.d2[i][j] = Eigen::VectorXd::Zero(n);
  }
  const auto at = [&](int i, int a, int j = -1, int b = 0) -> const Eigen::VectorXd& {
    Offset o{};
    o[i] = a;
    if (j >= 0) o[j] = b;
    return values.at(o);
  };
  for (int i = 0; i < 4; ++i) {
    if (!active[i]) continue;
    for (const auto& [s, c] : w.first) d.d1[i] += c * (at(i, s) - at(i, -s));
    d.d1[i] /= h;
    for (const auto& [s, c] : w.second) {
      if (s == 0)
        d.d2[i][i] += c * centre;
      else
        d.d2[i][i] += c * (at(i, s) + at(i, -s));
    }
    d.d2[i][i] /= h * h;
    for (int j = i + 1; j < 4; ++j) {
      if (!active[j]) continue;
      Eigen::VectorXd m = Eigen::VectorXd::Zero(n);
      for (const auto& [s, cs] : w.first)
        for (const auto& [t, ct] : w.first)
          m += cs * ct * (at(i, s, j, t) - at(i, -s, j, t) - at(i, s, j, -t) + at(i, -s, j, -t));
      m /= h * h;
      d.d2[i][j] = m;
      d.d2[j][i] = m;
    }
  }
  return d;
}

bool stencil_admissible(const Vec4& x, int order, double h, const DirectionMask& active,
                        const Admissible& admissible) {
  if (!admissible) return true;
  for (const Offset& o : stencil_offsets(order, active))
    if (!admissible(displaced(x, o, h))) return false;
  return true;
}

void combine(DerivativeSet& fine, const DerivativeSet& coarse, double factor) {
  const double denom = factor - 1.0;
  for (int i = 0; i < 4; ++i) {
    fine.d1[i] = (factor * fine.d1[i] - coarse.d1[i]) / denom;
    for (int j = 0; j < 4; ++j) fine.d2[i][j] = (factor * fine.d2[i][j] - coarse.d2[i][j]) / denom;
  }
}

}  // namespace

DerivativeSet differentiate(const VectorFunction& f, const Vec4& x, const FdScheme& scheme,
                            const DirectionMask& active, const Admissible& admissible) {
  scheme.validate();
  double h = scheme.step;
  int shrinks = 0;
  while (!stencil_admissible(x, scheme.order, h, active, admissible)) {
    if (++shrinks > scheme.max_shrinks)
      throw StencilError("no admissible FD step near the domain margin");
    h *= 0.5;
  }
  DerivativeSet coarse = single_step(f, x, scheme.order, h, active);
  if (!scheme.richardson) return coarse;
  DerivativeSet fine = single_step(f, x, scheme.order, 0.5 * h, active);
  combine(fine, coarse, std::pow(2.0, scheme.order));
  fine.step = h;
  return fine;
}

namespace {

// Pure second difference along one axis with integer weights over a common denominator, summed
// in long double. The step is snapped so that x + h is representable.
template <class Sample>
long double axis_second_difference(const Sample& g, double x, int order, double h) {
  const double step = (x + h) - x;
  long double sum = 0.0L;
  if (order == 2) {
    sum = g(x + step) + g(x - step) - 2.0L * g(x);
  } else {
    sum = (16.0L * (g(x + step) + g(x - step)) - (g(x + 2.0 * step) + g(x - 2.0 * step)) -
           30.0L * g(x)) /
          12.0L;
  }
  return sum / (static_cast<long double>(step) * step);
}

}  // namespace

double w_equation_residual_fd(const AngleField& angle, const ScalarField& w, const MomentPoint& x,
                              const FdScheme& scheme) {
  scheme.validate();
  // weight: 0 for W, +1 for (1+p)W, -1 for (1-p)W
  const auto sample = [&](const MomentPoint& m, int weight) -> long double {
    try {
      const long double v = w.value(m);
      if (weight == 0) return v;
      return (1.0L + weight * static_cast<long double>(angle.angle_value(m))) * v;
    } catch (const DomainError& e) {
      throw StencilError(std::string("stencil point outside the domain: ") + e.what());
    } catch (const DegenerateAngleError& e) {
      throw StencilError(std::string("stencil point at a degenerate angle: ") + e.what());
    }
  };
  const auto residual_at = [&](double h) {
    const long double w11 = axis_second_difference(
        [&](double t) { return sample({t, x.mu_plus, x.mu_minus}, 0); }, x.mu1, scheme.order, h);
    const long double wpp = axis_second_difference(
        [&](double t) { return sample({x.mu1, t, x.mu_minus}, 1); }, x.mu_plus, scheme.order, h);
    const long double wmm = axis_second_difference(
        [&](double t) { return sample({x.mu1, x.mu_plus, t}, -1); }, x.mu_minus, scheme.order, h);
    return w11 + 0.5L * (wpp + wmm);
  };
  const long double coarse = residual_at(scheme.step);
  if (!scheme.richardson) return static_cast<double>(coarse);
  const long double factor = scheme.order == 2 ? 4.0L : 16.0L;
  return static_cast<double>((factor * residual_at(0.5 * scheme.step) - coarse) / (factor - 1.0L));
}

namespace {

constexpr int kG = 0;
constexpr int kH = 16;
constexpr int kStarH = 80;
constexpr int kF = 84;
constexpr int kI = 85;
constexpr int kJ = 101;
constexpr int kHolI = 117;
constexpr int kHolJ = 149;
constexpr int kPacked = 181;

Eigen::VectorXd pack(const PointFields& p) {
  Eigen::VectorXd v(kPacked);
  Eigen::Map<Mat4>(v.data() + kG) = p.g;
  for (int n = 0; n < 64; ++n) v[kH + n] = p.torsion.c[n];
  v.segment<4>(kStarH) = hodge_star_3(p.g, p.torsion, 1.0);
  v[kF] = p.potential;
  Eigen::Map<Mat4>(v.data() + kI) = p.I;
  Eigen::Map<Mat4>(v.data() + kJ) = p.J;
  Eigen::Map<Mat4>(v.data() + kHolI) = p.hol_i.real();
  Eigen::Map<Mat4>(v.data() + kHolI + 16) = p.hol_i.imag();
  Eigen::Map<Mat4>(v.data() + kHolJ) = p.hol_j.real();
  Eigen::Map<Mat4>(v.data() + kHolJ + 16) = p.hol_j.imag();
  return v;
}

Mat4 mat_at(const Eigen::VectorXd& v, int offset) { return Eigen::Map<const Mat4>(v.data() + offset); }

Eigen::Matrix4cd cmat_at(const Eigen::VectorXd& v, int offset) {
  Eigen::Matrix4cd m;
  m.real() = mat_at(v, offset);
  m.imag() = mat_at(v, offset + 16);
  return m;
}

ThreeForm4 form3_at(const Eigen::VectorXd& v, int offset) {
  ThreeForm4 t;
  for (int n = 0; n < 64; ++n) t.c[n] = v[offset + n];
  return t;
}

inline int ci(int a, int b, int c) { return 16 * a + 4 * b + c; }
inline int ri(int a, int b, int c, int d) { return 64 * a + 16 * b + 4 * c + d; }

struct MetricJet {
  Mat4 g, gi;
  std::array<Mat4, 4> dg;
  std::array<std::array<Mat4, 4>, 4> ddg;
};

MetricJet metric_jet(const DerivativeSet& d, int offset) {
  MetricJet m;
  m.g = mat_at(d.value, offset);
  m.gi = m.g.inverse();
  for (int k = 0; k < 4; ++k) {
    m.dg[k] = mat_at(d.d1[k], offset);
    for (int l = 0; l < 4; ++l) m.ddg[k][l] = mat_at(d.d2[k][l], offset);
  }
  return m;
}

CurvatureTensors curvature_from_jet(const MetricJet& m) {
  CurvatureTensors out;
  Christoffel& gam = out.christoffel;
  // Lowered symbols Gamma_{d,bc} and their derivatives.
  std::array<double, 64> low{};
  std::array<std::array<double, 64>, 4> dlow{};
  for (int d = 0; d < 4; ++d)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        low[ci(d, b, c)] = 0.5 * (m.dg[b](d, c) + m.dg[c](d, b) - m.dg[d](b, c));
        for (int k = 0; k < 4; ++k)
          dlow[k][ci(d, b, c)] = 0.5 * (m.ddg[k][b](d, c) + m.ddg[k][c](d, b) - m.ddg[k][d](b, c));
      }
  std::array<Mat4, 4> dgi;
  for (int k = 0; k < 4; ++k) dgi[k] = -m.gi * m.dg[k] * m.gi;
  std::array<std::array<double, 64>, 4> dgam{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        double s = 0.0;
        for (int d = 0; d < 4; ++d) s += m.gi(a, d) * low[ci(d, b, c)];
        gam[ci(a, b, c)] = s;
        for (int k = 0; k < 4; ++k) {
          double t = 0.0;
          for (int d = 0; d < 4; ++d)
            t += dgi[k](a, d) * low[ci(d, b, c)] + m.gi(a, d) * dlow[k][ci(d, b, c)];
          dgam[k][ci(a, b, c)] = t;
        }
      }
  Riemann& r = out.riemann;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          double s = dgam[c][ci(a, d, b)] - dgam[d][ci(a, c, b)];
          for (int e = 0; e < 4; ++e)
            s += gam[ci(a, c, e)] * gam[ci(e, d, b)] - gam[ci(a, d, e)] * gam[ci(e, c, b)];
          r[ri(a, b, c, d)] = s;
        }
  for (int b = 0; b < 4; ++b)
    for (int d = 0; d < 4; ++d) {
      double s = 0.0;
      for (int a = 0; a < 4; ++a) s += r[ri(a, b, a, d)];
      out.ricci(b, d) = s;
    }
  out.scalar = (m.gi.cwiseProduct(out.ricci)).sum();
  double bianchi = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d)
          bianchi = std::max(bianchi, std::abs(r[ri(a, b, c, d)] + r[ri(a, c, d, b)] +
                                               r[ri(a, d, b, c)]));
  out.bianchi_residual = bianchi;
  return out;
}

template <class M>
double max_abs(const M& m) {
  return m.cwiseAbs().maxCoeff();
}

// (dF)_{abc} = d_a F_bc + d_b F_ca + d_c F_ab for 2-form derivatives dF[k].
template <class M>
double exterior_2_max(const std::array<M, 4>& dF) {
  double out = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      for (int c = b + 1; c < 4; ++c)
        out = std::max(out, std::abs(dF[a](b, c) + dF[b](c, a) + dF[c](a, b)));
  return out;
}

ThreeForm4 exterior_2(const std::array<Mat4, 4>& dF) {
  ThreeForm4 out;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) out(a, b, c) = dF[a](b, c) + dF[b](c, a) + dF[c](a, b);
  return out;
}

// Derivation action of an endomorphism on a 3-form, summed over slots.
ThreeForm4 act_on_slots(const Mat4& e, const ThreeForm4& t) {
  ThreeForm4 out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        double s = 0.0;
        for (int a = 0; a < 4; ++a)
          s += e(a, i) * t(a, j, k) + e(a, j) * t(i, a, k) + e(a, k) * t(i, j, a);
        out(i, j, k) = s;
      }
  return out;
}

double nijenhuis_max(const Mat4& e, const std::array<Mat4, 4>& de) {
  double out = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = b + 1; c < 4; ++c) {
        double s = 0.0;
        for (int d = 0; d < 4; ++d) {
          s += e(d, b) * de[d](a, c) - e(d, c) * de[d](a, b);
          s -= e(a, d) * (de[b](d, c) - de[c](d, b));
        }
        out = std::max(out, std::abs(s));
      }
  return out;
}

}  // namespace

CurvatureTensors curvature_tensors(const MetricFunction& g, const Vec4& x, const FdScheme& scheme,
                                   const DirectionMask& active, const Admissible& admissible) {
  const VectorFunction packed = [&](const Vec4& y) {
    const Mat4 m = g(y);
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(m.data(), 16));
  };
  const DerivativeSet d = differentiate(packed, x, scheme, active, admissible);
  CurvatureTensors out = curvature_from_jet(metric_jet(d, 0));
  out.step = d.step;
  return out;
}

Mat4 h_squared(const ThreeForm4& h, const Mat4& g) {
  const Mat4 gi = g.inverse();
  Mat4 out = Mat4::Zero();
  // Raise the last two slots once, then contract.
  ThreeForm4 up;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k)
      for (int l = 0; l < 4; ++l) {
        double s = 0.0;
        for (int m = 0; m < 4; ++m)
          for (int n = 0; n < 4; ++n) s += gi(k, m) * gi(l, n) * h(i, m, n);
        up(i, k, l) = s;
      }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) s += h(i, k, l) * up(j, k, l);
      out(i, j) = s;
    }
  return out;
}

PointAnalysis analyze_point(const ChartField& field, const Vec4& x, const FdScheme& scheme,
                            const DirectionMask& active, const Admissible& admissible) {
  const VectorFunction packed = [&](const Vec4& y) { return pack(field(y)); };
  const DerivativeSet d = differentiate(packed, x, scheme, active, admissible);
  const MetricJet m = metric_jet(d, kG);
  const CurvatureTensors curv = curvature_from_jet(m);

  PointAnalysis out;
  out.step = d.step;
  out.ricci = curv.ricci;

  const ThreeForm4 h = form3_at(d.value, kH);
  const Vec4 df(d.d1[0][kF], d.d1[1][kF], d.d1[2][kF], d.d1[3][kF]);
  Mat4 hess;
  for (int b = 0; b < 4; ++b)
    for (int c = 0; c < 4; ++c) {
      double s = d.d2[b][c][kF];
      for (int a = 0; a < 4; ++a) s -= curv.christoffel[ci(a, b, c)] * df[a];
      hess(b, c) = s;
    }
  out.einstein = curv.ricci - 0.25 * h_squared(h, m.g) + hess;

  Mat4 d_star_h;  // (d *H)_{kj}
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 4; ++j) d_star_h(k, j) = d.d1[k][kStarH + j] - d.d1[j][kStarH + k];
  const Mat4 codiff = -hodge_star_2(m.g, d_star_h, 1.0);
  const Vec4 grad_f = m.gi * df;
  Mat4 contraction = Mat4::Zero();
  for (int b = 0; b < 4; ++b)
    for (int c = 0; c < 4; ++c)
      for (int a = 0; a < 4; ++a) contraction(b, c) += grad_f[a] * h(a, b, c);
  out.bianchi = codiff + contraction;

  std::array<Eigen::Matrix4cd, 4> d_hol_i, d_hol_j;
  std::array<Mat4, 4> d_i, d_j, d_wi, d_wj;
  const Mat4 ci_ = mat_at(d.value, kI);
  const Mat4 cj_ = mat_at(d.value, kJ);
  for (int k = 0; k < 4; ++k) {
    d_hol_i[k] = cmat_at(d.d1[k], kHolI);
    d_hol_j[k] = cmat_at(d.d1[k], kHolJ);
    d_i[k] = mat_at(d.d1[k], kI);
    d_j[k] = mat_at(d.d1[k], kJ);
    d_wi[k] = d_i[k].transpose() * m.g + ci_.transpose() * m.dg[k];
    d_wj[k] = d_j[k].transpose() * m.g + cj_.transpose() * m.dg[k];
  }
  const ThreeForm4 torsion_i = act_on_slots(ci_, exterior_2(d_wi));
  const ThreeForm4 torsion_j = act_on_slots(cj_, exterior_2(d_wj));

  double dh = 0.0;
  {
    std::array<ThreeForm4, 4> dH;
    for (int k = 0; k < 4; ++k) dH[k] = form3_at(d.d1[k], kH);
    dh = std::abs(dH[0](1, 2, 3) - dH[1](0, 2, 3) + dH[2](0, 1, 3) - dH[3](0, 1, 2));
  }

  auto& r = out.residuals;
  r[identity::kEinstein] = max_abs(out.einstein);
  r[identity::kBianchi] = max_abs(out.bianchi);
  r[identity::kRicci] = max_abs(out.ricci);
  r[identity::kRicciSymmetry] = max_abs(Mat4(out.ricci - out.ricci.transpose()));
  r[identity::kHolomorphicI] = exterior_2_max(d_hol_i);
  r[identity::kHolomorphicJ] = exterior_2_max(d_hol_j);
  r[identity::kNijenhuisI] = nijenhuis_max(ci_, d_i);
  r[identity::kNijenhuisJ] = nijenhuis_max(cj_, d_j);
  r[identity::kTorsionI] = (torsion_i - h).max_abs();
  r[identity::kTorsionJ] = (torsion_j + h).max_abs();
  r[identity::kClosedTorsion] = dh;
  r[identity::kRealPartsAgree] =
      max_abs(Mat4(cmat_at(d.value, kHolI).real() - cmat_at(d.value, kHolJ).real()));
  // relative defect of Omega(I., .) = i Omega
  const auto type_defect = [](const Eigen::Matrix4cd& form, const Mat4& cs) {
    return check_holomorphic(form, cs).type_defect / std::max(form.cwiseAbs().maxCoeff(), 1e-300);
  };
  r[identity::kTypeI] = type_defect(cmat_at(d.value, kHolI), ci_);
  r[identity::kTypeJ] = type_defect(cmat_at(d.value, kHolJ), cj_);
  return out;
}

bool VerificationReport::pass() const {
  return std::all_of(identities.begin(), identities.end(),
                     [](const IdentityStat& s) { return s.pass; });
}

const IdentityStat& VerificationReport::get(const std::string& name) const {
  for (const auto& s : identities)
    if (s.name == name) return s;
  throw InvalidParamsError("report has no identity named " + name);
}

nlohmann::json VerificationReport::to_json(bool include_points) const {
  nlohmann::json out;
  out["pass"] = pass();
  out["identities"] = nlohmann::json::array();
  for (const auto& s : identities) {
    out["identities"].push_back({{"name", s.name},
                                 {"max", s.max},
                                 {"mean", s.mean},
                                 {"n", s.n},
                                 {"step", s.step},
                                 {"order", s.order},
                                 {"tolerance", s.tolerance},
                                 {"pass", s.pass}});
  }
  if (include_points) {
    out["points"] = nlohmann::json::array();
    for (const auto& p : points) {
      out["points"].push_back(
          {{"x", {p.x[0], p.x[1], p.x[2], p.x[3]}}, {"values", p.values}});
    }
  }
  return out;
}

ToleranceTable soliton_tolerances(double tol) {
  return {{identity::kEinstein, tol}, {identity::kBianchi, tol}};
}

ToleranceTable gk_axiom_tolerances(double tol, double closed_torsion_tol, double type_tol) {
  return {{identity::kHolomorphicI, tol}, {identity::kHolomorphicJ, tol},
          {identity::kNijenhuisI, tol},   {identity::kNijenhuisJ, tol},
          {identity::kTorsionI, tol},     {identity::kTorsionJ, tol},
          {identity::kRealPartsAgree, tol},
          {identity::kClosedTorsion, closed_torsion_tol},
          {identity::kTypeI, type_tol},   {identity::kTypeJ, type_tol}};
}

ToleranceTable ricci_tolerances(double tol) { return {{identity::kRicci, tol}}; }

VerificationReport verify_samples(const ChartFactory& charts, const std::vector<Vec4>& samples,
                                  const FdScheme& scheme, const ToleranceTable& identities,
                                  const DirectionMask& active, const Admissible& admissible) {
  scheme.validate();
  std::vector<PointRecord> records(samples.size());
  std::vector<double> steps(samples.size(), scheme.step);
  parallel_for(samples.size(), [&](std::size_t n) {
    const ChartField field = charts(samples[n]);
    const PointAnalysis a = analyze_point(field, samples[n], scheme, active, admissible);
    records[n].x = samples[n];
    for (const auto& [name, tol] : identities) records[n].values[name] = a.residuals.at(name);
    steps[n] = a.step;
  });

  VerificationReport report;
  const double step = samples.empty() ? scheme.step : *std::min_element(steps.begin(), steps.end());
  for (const auto& [name, tol] : identities) {
    IdentityStat s;
    s.name = name;
    s.tolerance = tol;
    s.order = scheme.order;
    s.step = step;
    s.n = records.size();
    double sum = 0.0;
    for (const auto& r : records) {
      const double v = r.values.at(name);
      s.max = std::max(s.max, v);
      sum += v;
    }
    s.mean = records.empty() ? 0.0 : sum / static_cast<double>(records.size());
    s.pass = !records.empty() && s.max < tol;
    report.identities.push_back(s);
  }
  report.points = std::move(records);
  return report;
}

ChartFactory ansatz_charts(const GkStructure& structure, std::optional<SolitonParams> soliton,
                           double potential_scale) {
  return [structure, soliton, potential_scale](const Vec4& centre) -> ChartField {
    const GkStructure local = structure.recentred(ChartPoint::from_coords(centre).base);
    return [local, soliton, potential_scale](const Vec4& y) {
      const ChartPoint cp = ChartPoint::from_coords(y);
      const AssembledTensors t = local.tensors(cp);
      PointFields p;
      p.g = t.g;
      p.I = t.I;
      p.J = t.J;
      // coframe path, so Re(Omega_I) - Re(Omega_J) is not zero by construction
      const HolomorphicForms hol =
          holomorphic_forms(t.angle, t.w, local.potential()(cp.base));
      p.hol_i = hol.omega_i;
      p.hol_j = hol.omega_j;
      p.torsion = lee_form(local.angle().angle1(cp.base), t).torsion;
      p.potential = soliton ? potential_scale * soliton_potential(*soliton, cp.base) : 0.0;
      return p;
    };
  };
}

double h_distance(const AngleField& angle, const MomentPoint& a, const MomentPoint& b) {
  const Eigen::Vector3d v = a.vec() - b.vec();
  const MomentPoint mid = MomentPoint::from_vec(0.5 * (a.vec() + b.vec()));
  const BaseMetric h = base_metric(AngleValue(angle.angle_value(mid)));
  return std::sqrt(v.cwiseProduct(h.diagonal).dot(v));
}

namespace {

bool point_ok(const AngleField& angle, const MomentPoint& x, const std::vector<MomentPoint>& poles,
              double max_angle, double margin) {
  const double p = angle.angle_value(x);
  if (!(std::abs(p) <= max_angle)) return false;
  for (const auto& z : poles) {
    // Coarse screen in coordinates before the metric distance.
    if ((x.vec() - z.vec()).norm() > 10.0 * margin + 10.0) continue;
    const double pz = angle.angle_value(MomentPoint::from_vec(0.5 * (x.vec() + z.vec())));
    if (std::abs(pz) >= 1.0) return false;
    if (h_distance(angle, x, z) < margin) return false;
  }
  return true;
}

}  // namespace

std::vector<Vec4> sample_points(const AngleField& angle, const SampleBox& box,
                                const std::vector<MomentPoint>& poles,
                                const SamplingOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> fibre(0.0, 2.0 * std::numbers::pi);
  std::vector<Vec4> out;
  out.reserve(options.samples);
  std::size_t attempts = 0;
  while (out.size() < options.samples) {
    if (++attempts > options.max_attempts)
      throw DomainError("sampler could not find enough admissible points in the box");
    const Eigen::Vector3d u(unit(rng), unit(rng), unit(rng));
    const Eigen::Vector3d mu = box.center + box.half_width.cwiseProduct(u);
    const double t = fibre(rng);
    const MomentPoint x = MomentPoint::from_vec(mu);
    if (!point_ok(angle, x, poles, options.max_angle, options.pole_margin)) continue;
    out.emplace_back(t, mu[0], mu[1], mu[2]);
  }
  return out;
}

Admissible ansatz_admissible(std::shared_ptr<const AngleField> angle,
                             std::vector<MomentPoint> poles, double max_angle,
                             double pole_margin) {
  return [angle = std::move(angle), poles = std::move(poles), max_angle,
          pole_margin](const Vec4& y) {
    return point_ok(*angle, ChartPoint::from_coords(y).base, poles, max_angle, pole_margin);
  };
}

PoleAsymptotics pole_asymptotics(const AngleField& angle, const ScalarField& w,
                                 const MomentPoint& pole, const std::vector<double>& radii,
                                 int rays, double tolerance) {
  if (radii.size() < 2) throw InvalidParamsError("pole asymptotics needs at least two radii");
  if (rays < 1 || rays > 6) throw InvalidParamsError("pole asymptotics uses 1 to 6 rays");
  std::vector<double> sorted = radii;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const BaseMetric hz = base_metric(AngleValue(angle.angle_value(pole)));
  const Eigen::Vector3d inv_sqrt = hz.diagonal.cwiseSqrt().cwiseInverse();

  PoleAsymptotics out;
  out.tolerance = tolerance;
  for (double r : sorted) {
    if (!(r > 0.0)) throw InvalidParamsError("radii must be positive");
    PoleRadiusStat s;
    s.radius = r;
    std::vector<double> vals;
    for (int k = 0; k < rays; ++k) {
      Eigen::Vector3d u = Eigen::Vector3d::Zero();
      u[k % 3] = k < 3 ? 1.0 : -1.0;
      const MomentPoint x = MomentPoint::from_vec(pole.vec() + r * inv_sqrt.cwiseProduct(u));
      const Jet1 wj = w.jet1(x);
      vals.push_back(wj.v * r);
      const BaseMetric hx = base_metric(AngleValue(angle.angle_value(x)));
      const double grad = std::sqrt(wj.d.cwiseProduct(hx.diagonal.cwiseInverse()).dot(wj.d));
      s.gradient_decay = std::max(s.gradient_decay, r * r * r * grad);
    }
    double sum = 0.0;
    for (double v : vals) sum += v;
    s.w_times_distance = sum / static_cast<double>(vals.size());
    for (double v : vals) s.spread = std::max(s.spread, std::abs(v - s.w_times_distance));
    out.radii.push_back(s);
  }
  const auto& last = out.radii.back();
  const auto& second = out.radii[out.radii.size() - 2];
  out.limit = last.w_times_distance;
  const auto near_half = [&](const PoleRadiusStat& s) {
    double worst = std::abs(s.w_times_distance - 0.5) + s.spread;
    return worst < tolerance * 0.5;
  };
  out.limit_ok = near_half(last) && near_half(second);
  out.gradient_ok = true;
  for (std::size_t i = 1; i < out.radii.size(); ++i)
    out.gradient_ok = out.gradient_ok && out.radii[i].gradient_decay < out.radii[i - 1].gradient_decay;
  return out;
}

}  // namespace gkforge
