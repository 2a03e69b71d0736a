#include <doctest.h>

#include <cmath>
#include <complex>
#include <memory>

#include "gkforge/connection_bundle.hpp"
#include "gkforge/errors.hpp"
#include "gkforge/examples.hpp"
#include "test_support.hpp"

using namespace gkforge;
using namespace gkforge::examples;
using testing_support::uniform;

namespace {

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

Vec4 random_chart_point(double spread = 0.8) {
  return {uniform(-spread, spread), uniform(-3, 3), uniform(-spread, spread), uniform(-3, 3)};
}

// Checks i_X Omega = d(first) - i d(second) on the (x1, y1, x2, y2) chart.
template <class First, class Second>
double moment_defect(const Eigen::Matrix4cd& form, const Vec4& x, const Vec4& c,
                     const First& first, const Second& second) {
  const Eigen::Vector4cd contraction = form.transpose() * x;
  Eigen::Vector4cd d;
  for (int k = 0; k < 4; ++k) {
    const double a = testing_support::fd1(first, c, k, 1e-4);
    const double b = testing_support::fd1(second, c, k, 1e-4);
    d[k] = std::complex<double>(a, -b);
  }
  return (contraction - d).cwiseAbs().maxCoeff();
}

double trace_angle(const Mat4& i, const Mat4& j) { return -0.25 * (i * j).trace(); }

}  // namespace

TEST_CASE("standard Hopf: angle, W and complex structures") {
  const StandardHopf hopf;
  CHECK(hopf.angle({0.4, 1.0, 0.4, -2.0}) == doctest::Approx(0.0).epsilon(1e-15));
  for (int n = 0; n < 50; ++n) {
    const Vec4 c = random_chart_point();
    const PointFields f = hopf.fields(c);
    CHECK(hopf.w(c) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(trace_angle(f.I, f.J) == doctest::Approx(hopf.angle(c)).epsilon(1e-10));
    CHECK((complex_structure_from_form(f.hol_i) - f.I).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((f.J * f.J + Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((f.J.transpose() * f.g * f.J - f.g).cwiseAbs().maxCoeff() < 1e-10);
    const double e = std::exp(2 * c[0]) + std::exp(2 * c[2]);
    CHECK(hopf.angle(c) ==
          doctest::Approx((std::exp(2 * c[2]) - std::exp(2 * c[0])) / e).epsilon(1e-12));
  }
}

TEST_CASE("standard Hopf moment map contracts the holomorphic forms") {
  const StandardHopf hopf;
  const auto mu1 = [&](const Vec4& y) { return hopf.moment(y).mu1; };
  const auto mu2 = [&](const Vec4& y) { return hopf.moment(y).mu2(); };
  const auto mu3 = [&](const Vec4& y) { return hopf.moment(y).mu3(); };
  for (int n = 0; n < 10; ++n) {
    const Vec4 c = random_chart_point();
    const PointFields f = hopf.fields(c);
    CHECK(moment_defect(f.hol_i, hopf.generator(), c, mu1, mu2) < 1e-9);
    CHECK(moment_defect(f.hol_j, hopf.generator(), c, mu1, mu3) < 1e-9);
  }
}

TEST_CASE("standard Hopf is a soliton with f = 0 and satisfies the GK axioms") {
  const StandardHopf hopf;
  std::vector<Vec4> samples;
  for (int n = 0; n < 12; ++n) samples.push_back(random_chart_point());
  ToleranceTable table = soliton_tolerances(1e-4);
  for (const auto& e : gk_axiom_tolerances(1e-4, 1e-6)) table.push_back(e);
  const VerificationReport r =
      verify_samples(hopf.charts(), samples, {4, 5e-3}, table, StandardHopf::kActive);
  for (const auto& s : r.identities) {
    CAPTURE(s.name);
    CAPTURE(s.max);
    CHECK(s.pass);
  }
}

TEST_CASE("twice the standard Hopf metric is the ansatz at k = (1, 1), W = 4 W0") {
  const StandardHopf hopf;
  const SolitonParams params = StandardHopf::ansatz_params();
  auto angle = std::make_shared<SolitonAngle>(params);
  SuperpositionSpec spec;
  spec.lambda = StandardHopf::kAnsatzLambda;
  auto w = std::make_shared<ScalarSolution>(superpose(OrbifoldModel::for_params(params), spec));
  for (int n = 0; n < 6; ++n) {
    const Vec4 c = random_chart_point(0.6);
    const MomentPoint mu = hopf.moment(c);
    CHECK(angle->angle_value(mu) == doctest::Approx(hopf.angle(c)).epsilon(1e-12));
    CHECK(w->value(mu) ==
          doctest::Approx(hopf.w(c) / StandardHopf::kAnsatzMetricScale).epsilon(1e-12));

    const GkStructure gk(angle, w, GaugePotential(angle, w, mu));
    const MetricFunction ansatz = [&](const Vec4& y) {
      return gk.tensors(ChartPoint::from_coords(y)).g;
    };
    const MetricFunction cover = [&](const Vec4& y) { return hopf.metric(y); };
    const CurvatureTensors a = curvature_tensors(ansatz, ChartPoint{0.0, mu}.coords(), {4, 5e-3});
    const CurvatureTensors b = curvature_tensors(cover, c, {4, 5e-3}, StandardHopf::kActive);
    CHECK(a.scalar * StandardHopf::kAnsatzMetricScale == doctest::Approx(b.scalar).epsilon(1e-6));

    const AssembledTensors t = gk.tensors(ChartPoint{0.0, mu});
    const ThreeForm4 h_ansatz = gk.lee(ChartPoint{0.0, mu}).torsion;
    const PointFields f = hopf.fields(c);
    const double norm_a = (t.g.inverse() * h_squared(h_ansatz, t.g)).trace();
    const double norm_b = (f.g.inverse() * h_squared(f.torsion, f.g)).trace();
    CHECK(norm_a * StandardHopf::kAnsatzMetricScale == doctest::Approx(norm_b).epsilon(1e-9));
  }
}

TEST_CASE("Hopf holomorphic forms are twice the Poisson-normalized forms") {
  const StandardHopf hopf;
  const DiagonalHopf diagonal({9.0, 4.0, 3, 2}, std::make_shared<TanhProfile>(0.4));
  for (int n = 0; n < 10; ++n) {
    const Vec4 c = random_chart_point();
    const PointFields f = hopf.fields(c);
    const Mat4 sigma = 0.5 * (f.I * f.J - f.J * f.I) * f.g.inverse();
    CHECK((sigma * f.hol_i.real().transpose() - 2.0 * Mat4::Identity()).cwiseAbs().maxCoeff() <
          1e-10);
    const Mat4 i = complex_structure_from_form(diagonal.holomorphic_i());
    const Mat4 j = complex_structure_from_form(diagonal.holomorphic_j(c));
    const Mat4 s = 0.5 * (i * j - j * i) * diagonal.metric(c).inverse();
    CHECK((s * diagonal.holomorphic_i().real().transpose() - 2.0 * Mat4::Identity())
              .cwiseAbs()
              .maxCoeff() < 1e-10);
  }
}

TEST_CASE("diagonal Hopf parameters are validated") {
  CHECK_NOTHROW(DiagonalHopfParams{1.0, 4.0, 1, 2}.validate());
  CHECK_NOTHROW(DiagonalHopfParams{9.0, 4.0, 3, 2}.validate());
  CHECK_THROWS_AS((DiagonalHopfParams{1.0, 2.0, 1, 2}.validate()), InvalidParamsError);
  CHECK_THROWS_AS((DiagonalHopfParams{4.0, 4.0, 2, 2}.validate()), InvalidParamsError);
  CHECK_THROWS_AS((DiagonalHopfParams{-1.0, 4.0, 1, 2}.validate()), InvalidParamsError);
  CHECK_THROWS_AS((DiagonalHopf({1.0, 4.0, 1, 2}, nullptr)), InvalidParamsError);
}

TEST_CASE("diagonal Hopf structure: angle, W and moment map") {
  for (const DiagonalHopfParams params : {DiagonalHopfParams{1.0, 4.0, 1, 2},
                                          DiagonalHopfParams{9.0, 4.0, 3, 2}}) {
    const DiagonalHopf hopf(params, std::make_shared<TanhProfile>(0.4));
    const auto mu1 = [&](const Vec4& y) { return hopf.moment(y).mu1; };
    const auto mu2 = [&](const Vec4& y) { return hopf.moment(y).mu2(); };
    const auto mu3 = [&](const Vec4& y) { return hopf.moment(y).mu3(); };
    for (int n = 0; n < 10; ++n) {
      const Vec4 c = random_chart_point();
      const Mat4 i = complex_structure_from_form(hopf.holomorphic_i());
      const Mat4 j = complex_structure_from_form(hopf.holomorphic_j(c));
      const Mat4 g = hopf.metric(c);
      CHECK(trace_angle(i, j) == doctest::Approx(hopf.angle(c)).epsilon(1e-10));
      CHECK((j.transpose() * g * j - g).cwiseAbs().maxCoeff() < 1e-10);
      const double p = hopf.profile_angle(c);
      const double a = params.a, b = params.b, m = params.m, nn = params.n;
      const double w_inv = (m * m * b * b * (1 + p) + nn * nn * a * a * (1 - p)) / (2 * a * b);
      CHECK(1.0 / hopf.w(c) == doctest::Approx(w_inv).epsilon(1e-12));
      CHECK(moment_defect(hopf.holomorphic_i(), hopf.generator(), c, mu1, mu2) < 1e-8);
      CHECK(moment_defect(hopf.holomorphic_j(c), hopf.generator(), c, mu1, mu3) < 1e-8);
    }
  }
}

TEST_CASE("diagonal Hopf soliton profile gives a linear Phi, a generic profile does not") {
  const DiagonalHopfParams params{1.0, 4.0, 1, 2};
  std::vector<Vec4> points;
  for (int n = 0; n < 40; ++n) points.push_back(random_chart_point(0.5));
  const DiagonalHopf soliton(params, std::make_shared<SolitonProfile>(params.ratio(), 0.3));
  CHECK(soliton.phi_linearity_residual(points) < 1e-6);
  const DiagonalHopf generic(params, std::make_shared<TanhProfile>(0.3));
  CHECK(generic.phi_linearity_residual(points) > 1e-2);

  // the profile ODE itself, checked by central differences
  const SolitonProfile profile(params.ratio());
  const auto phi = [&](double u) {
    const double p = profile(u).p;
    return std::log((1 - p) / (1 + p));
  };
  for (double u : {-2.0, -0.3, 0.7, 3.0}) {
    const double h = 1e-4;
    const double dphi = (phi(u + h) - phi(u - h)) / (2 * h);
    const double p = profile(u).p;
    const double r = params.ratio();
    CHECK(dphi == doctest::Approx(0.5 * (1 - r) * p + 0.5 * (1 + r)).epsilon(1e-7));
    CHECK((profile(u + h).chi - profile(u - h).chi) / (2 * h) == doctest::Approx(p).epsilon(1e-7));
  }
}

TEST_CASE("Gibbons-Hawking data: positivity, closed curvature, Eguchi-Hanson class is Ricci-flat") {
  CHECK_THROWS_AS(gibbons_hawking(-1.0, {{0, 0, 0}}), InvalidParamsError);
  CHECK_THROWS_AS(gibbons_hawking(0.0, {}), InvalidParamsError);

  const GibbonsHawking eh = gibbons_hawking(0.0, {{0.0, 0.3, 0.0}, {0.0, -0.3, 0.0}});
  for (int n = 0; n < 10; ++n) {
    const MomentPoint x{uniform(-1, 1), uniform(-1, 1), uniform(0.3, 1)};
    const auto component = [&](int a, int b) {
      return [&, a, b](const Eigen::Vector3d& y) {
        return curvature(*eh.angle, *eh.w, MomentPoint::from_vec(y))(a, b);
      };
    };
    const Eigen::Vector3d v = x.vec();
    const double h = 1e-3;
    const double d_beta = testing_support::fd1(component(1, 2), v, 0, h) +
                          testing_support::fd1(component(2, 0), v, 1, h) +
                          testing_support::fd1(component(0, 1), v, 2, h);
    CHECK(std::abs(d_beta) < 1e-7);
  }

  const GkStructure gk(eh.angle, eh.w, GaugePotential(eh.angle, eh.w, {0.5, 0.2, 0.4}, eh.centres));
  SamplingOptions opts;
  opts.samples = 6;
  opts.seed = 9;
  const auto samples =
      sample_points(*eh.angle, {Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones()}, eh.centres, opts);
  const VerificationReport r =
      verify_samples(ansatz_charts(gk), samples, {4, 1e-2}, ricci_tolerances(1e-4),
                     kFibreInvariant, ansatz_admissible(eh.angle, eh.centres, 0.95, 0.15));
  CHECK(r.get(identity::kRicci).max < 1e-4);
}

TEST_CASE("LeBrun dictionary and Green's sum") {
  CHECK_THROWS_AS(LeBrunInoue(1.0), InvalidParamsError);
  const LeBrunInoue lebrun(2.0);

  // Green's function: positive, 1/(2 d) at short hyperbolic distance d, harmonic off the pole.
  const Eigen::Vector3d pole(0.0, 0.0, 1.0);
  const double d = 1e-4;
  CHECK(LeBrunInoue::green(Eigen::Vector3d(0, 0, std::exp(d)), pole) * 2 * d ==
        doctest::Approx(1.0).epsilon(1e-3));
  CHECK(LeBrunInoue::green(Eigen::Vector3d(5, 1, 0.1), pole) > 0.0);

  for (int n = 0; n < 8; ++n) {
    const Eigen::Vector3d q(uniform(-1, 1), uniform(-1, 1), uniform(0.2, 3.0));
    CAPTURE(q.transpose());
    CHECK(std::abs(lebrun.hyperbolic_laplacian_fd(q)) < 1e-5);
    const MomentPoint mu = LeBrunInoue::from_half_space(q);
    CHECK(mu.mu_minus < 0.0);
    CHECK((LeBrunInoue::to_half_space(mu) - q).norm() < 1e-12);
    const double p = lebrun.angle()->angle_value(mu);
    CHECK((lebrun.pulled_back_metric(mu) - 0.25 * base_metric(AngleValue(p)).matrix())
              .cwiseAbs()
              .maxCoeff() < 1e-8);
    CHECK(std::abs(w_equation_residual(*lebrun.angle(), *lebrun.w(), mu)) < 1e-8);
    CHECK(std::abs(w_equation_residual_fd(*lebrun.angle(), *lebrun.w(), mu, {4, 2e-3})) < 1e-5);
  }
  CHECK_THROWS_AS(LeBrunInoue::to_half_space({0.0, 0.0, 0.1}), DomainError);
  CHECK_THROWS_AS(lebrun.angle()->angle_value({0.0, 0.0, 0.0}), DomainError);

  // Truncated sum against a much tighter truncation.
  const LeBrunInoue tight(2.0, 1e-18);
  const Eigen::Vector3d q(0.4, -0.2, 0.8);
  CHECK(std::abs(lebrun.potential(q) - tight.potential(q)) <= 2 * lebrun.truncation_bound(q) + 1e-15);
  CHECK(lebrun.truncation_bound(q) < 1e-13);
}
