#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "gkforge/diffops.hpp"
#include "gkforge/errors.hpp"
#include "test_support.hpp"

using namespace gkforge;

namespace {

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

std::shared_ptr<FunctionField> gh_field(double mass, std::vector<MomentPoint> centres) {
  return std::make_shared<FunctionField>([=](const MomentPoint& x) {
    const auto m = MomentJet<Jet2>::seeded(x);
    Jet2 w = mass;
    for (const auto& z : centres) {
      const Jet2 a = m.mu1 - z.mu1;
      const Jet2 b = m.mu_plus - z.mu_plus;
      const Jet2 c = m.mu_minus - z.mu_minus;
      w = w + 0.5 * reciprocal(sqrt(a * a + 2.0 * b * b + 2.0 * c * c));
    }
    return w;
  });
}

struct Setup {
  std::shared_ptr<const AngleField> angle;
  std::shared_ptr<const ScalarField> w;
  std::vector<MomentPoint> poles;
  GkStructure structure;
};

Setup gh_setup(double mass, std::vector<MomentPoint> centres) {
  auto angle = std::make_shared<ConstantAngle>(0.0);
  auto w = gh_field(mass, centres);
  GkStructure gk(angle, w, GaugePotential(angle, w, {0.7, 0.3, -0.2}, centres));
  return {angle, w, centres, gk};
}

Setup soliton_setup(const SolitonParams& params, double lambda, double lambda0,
                    std::vector<MomentPoint> poles, double weight_scale = 1.0) {
  auto angle = std::make_shared<SolitonAngle>(params);
  SuperpositionSpec spec;
  spec.lambda = lambda;
  spec.lambda0 = lambda0;
  for (const auto& z : poles) spec.poles.push_back({z, weight_scale * pole_weight(params, z)});
  auto w = std::make_shared<ScalarSolution>(superpose(OrbifoldModel::for_params(params), spec));
  GkStructure gk(angle, w, GaugePotential(angle, w, {0.0, 0.0, 0.0}, poles));
  return {angle, w, poles, gk};
}

Eigen::VectorXd trig(const Vec4& x) {
  Eigen::VectorXd v(2);
  v << std::sin(x[0]) * std::cos(2 * x[1]) + x[2] * x[3] * x[3], std::exp(0.3 * x[1] - x[3]);
  return v;
}

double trig_error(const FdScheme& s, const Vec4& x) {
  const DerivativeSet d = differentiate(trig, x, s, kAllDirections);
  // exact d/dx0 and d2/dx1dx3 of the second component, d2/dx0dx1 of the first
  const double e1 = std::cos(x[0]) * std::cos(2 * x[1]);
  const double e2 = -2 * std::cos(x[0]) * std::sin(2 * x[1]);
  const double e3 = -0.3 * std::exp(0.3 * x[1] - x[3]);
  return std::max({std::abs(d.d1[0][0] - e1), std::abs(d.d2[0][1][0] - e2),
                   std::abs(d.d2[1][3][1] - e3)});
}

}  // namespace

TEST_CASE("order-4 stencil is exact on quartics") {
  const auto quartic = [](const Vec4& x) {
    Eigen::VectorXd v(1);
    v << x[0] * x[0] * x[1] * x[1] + x[2] * x[2] * x[2] * x[3] - 3 * x[3] * x[3] * x[3] * x[3];
    return v;
  };
  const Vec4 x(0.3, -0.7, 1.1, 0.4);
  const DerivativeSet d = differentiate(quartic, x, {4, 0.1}, kAllDirections);
  CHECK(d.d1[0][0] == doctest::Approx(2 * x[0] * x[1] * x[1]).epsilon(1e-10));
  CHECK(d.d1[3][0] == doctest::Approx(x[2] * x[2] * x[2] - 12 * std::pow(x[3], 3)).epsilon(1e-10));
  CHECK(d.d2[0][1][0] == doctest::Approx(4 * x[0] * x[1]).epsilon(1e-10));
  CHECK(d.d2[2][2][0] == doctest::Approx(6 * x[2] * x[3]).epsilon(1e-10));
  CHECK(d.d2[3][3][0] == doctest::Approx(-36 * x[3] * x[3]).epsilon(1e-10));
  CHECK(d.d2[2][3][0] == doctest::Approx(3 * x[2] * x[2]).epsilon(1e-10));
}

TEST_CASE("stencil error halves at the expected rate") {
  const Vec4 x(0.4, 0.2, -0.3, 0.5);
  for (int order : {2, 4}) {
    const double coarse = trig_error({order, 0.1}, x);
    const double fine = trig_error({order, 0.05}, x);
    CAPTURE(order);
    CHECK(coarse / fine >= 0.7 * std::pow(2.0, order));
  }
  const double plain = trig_error({2, 0.1}, x);
  const double extrapolated = trig_error({2, 0.1, true}, x);
  CHECK(extrapolated < 0.05 * plain);
}

TEST_CASE("masked directions have zero derivatives and are never sampled") {
  int calls = 0;
  const auto f = [&](const Vec4& x) {
    ++calls;
    return Eigen::VectorXd::Constant(1, std::sin(x[0]) + x[1] * x[2]);
  };
  const DerivativeSet d = differentiate(f, Vec4(0.5, 1, 2, 3), {4, 0.01}, kFibreInvariant);
  CHECK(d.d1[0][0] == 0.0);
  CHECK(d.d2[0][0][0] == 0.0);
  CHECK(d.d2[1][2][0] == doctest::Approx(1.0).epsilon(1e-9));
  // centre + 3 axes * 4 + 3 pairs * 16
  CHECK(calls == 1 + 12 + 48);
}

TEST_CASE("inadmissible stencils shrink the step, then fail") {
  const auto f = [](const Vec4& x) { return Eigen::VectorXd::Constant(1, x[1] * x[1]); };
  const Admissible near_wall = [](const Vec4& y) { return y[1] < 1.03; };
  const DerivativeSet d = differentiate(f, Vec4(0, 1, 0, 0), {4, 0.05}, kFibreInvariant, near_wall);
  CHECK(d.step == doctest::Approx(0.0125));
  CHECK(d.d1[1][0] == doctest::Approx(2.0));
  const Admissible wall = [](const Vec4& y) { return y[1] < 1.0; };
  CHECK_THROWS_AS(differentiate(f, Vec4(0, 1, 0, 0), {4, 0.05}, kFibreInvariant, wall),
                  StencilError);
  const auto throwing = [](const Vec4& y) -> Eigen::VectorXd {
    if (y[2] > 0.01) throw DomainError("outside");
    return Eigen::VectorXd::Zero(1);
  };
  CHECK_THROWS_AS(differentiate(throwing, Vec4::Zero(), {4, 0.01}), StencilError);
  CHECK_THROWS_AS(differentiate(f, Vec4::Zero(), {3, 0.01}), InvalidParamsError);
  CHECK_THROWS_AS(differentiate(f, Vec4::Zero(), {4, -1.0}), InvalidParamsError);
}

TEST_CASE("curvature of a flat metric and of S2 x R2") {
  const MetricFunction flat = [](const Vec4& x) {
    // Euclidean metric in polar coordinates on the (x1, x2) plane.
    Mat4 g = Mat4::Identity();
    g(2, 2) = x[1] * x[1];
    return g;
  };
  const CurvatureTensors c0 = curvature_tensors(flat, Vec4(0, 1.3, 0.2, 0), {4, 1e-2}, kAllDirections);
  double riemann = 0.0;
  for (double r : c0.riemann) riemann = std::max(riemann, std::abs(r));
  CHECK(riemann < 1e-8);
  CHECK(c0.christoffel[16 * 2 + 4 * 1 + 2] == doctest::Approx(1 / 1.3));

  const MetricFunction sphere = [](const Vec4& x) {
    Mat4 g = Mat4::Identity();
    g(2, 2) = std::sin(x[1]) * std::sin(x[1]);
    return g;
  };
  const double th = 0.9;
  const CurvatureTensors c = curvature_tensors(sphere, Vec4(0, th, 0.4, 0), {4, 1e-2}, kAllDirections);
  Mat4 expected = Mat4::Zero();
  expected(1, 1) = 1;
  expected(2, 2) = std::sin(th) * std::sin(th);
  CHECK((c.ricci - expected).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(c.scalar == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(c.bianchi_residual < 1e-10);
}

TEST_CASE("H squared on a coordinate 3-form") {
  ThreeForm4 h;
  const int perm[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}};
  for (int n = 0; n < 6; ++n) h(perm[n][0], perm[n][1], perm[n][2]) = n < 3 ? 1.0 : -1.0;
  const Mat4 e = h_squared(h, Mat4::Identity());
  CHECK((e - Eigen::Vector4d(2, 2, 2, 0).asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff() < 1e-15);
  const Mat4 scaled = h_squared(h, 2.0 * Mat4::Identity());
  CHECK(scaled(0, 0) == doctest::Approx(0.5));
  CHECK(scaled(3, 3) == 0.0);
}

TEST_CASE("H squared properties on random forms") {
  using testing_support::uniform;
  CHECK(h_squared(ThreeForm4{}, Mat4::Identity()).cwiseAbs().maxCoeff() == 0.0);
  for (int trial = 0; trial < 20; ++trial) {
    ThreeForm4 h;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        for (int k = j + 1; k < 4; ++k) {
          const double v = uniform(-1, 1);
          h(i, j, k) = h(j, k, i) = h(k, i, j) = v;
          h(j, i, k) = h(i, k, j) = h(k, j, i) = -v;
        }
    Mat4 m = Mat4::NullaryExpr([](Eigen::Index, Eigen::Index) { return uniform(-1, 1); });
    const Mat4 g = m * m.transpose() + Mat4::Identity();
    const Mat4 e = h_squared(h, g);
    CHECK((e - e.transpose()).cwiseAbs().maxCoeff() < 1e-13);
    // positive semidefinite with respect to g
    const Eigen::GeneralizedSelfAdjointEigenSolver<Mat4> eig(e, g);
    CHECK(eig.eigenvalues().minCoeff() > -1e-12);

    // frame change by a g-orthogonal matrix A: H' = A*H, g' = A^T g A = g, H^2' = A^T H^2 A
    const Eigen::HouseholderQR<Mat4> qr(
        Mat4::NullaryExpr([](Eigen::Index, Eigen::Index) { return uniform(-1, 1); }));
    const Mat4 q = qr.householderQ();
    const Eigen::LLT<Mat4> llt(g);
    const Mat4 l = llt.matrixL();
    const Mat4 a = l.transpose().inverse() * q * l.transpose();
    ThreeForm4 moved;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
          double sum = 0.0;
          for (int x = 0; x < 4; ++x)
            for (int y = 0; y < 4; ++y)
              for (int z = 0; z < 4; ++z) sum += a(x, i) * a(y, j) * a(z, k) * h(x, y, z);
          moved(i, j, k) = sum;
        }
    CHECK((a.transpose() * g * a - g).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((h_squared(moved, g) - a.transpose() * e * a).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("Taub-NUT chart is Ricci-flat with vanishing torsion") {
  const Setup s = gh_setup(1.0, {{0.0, 0.0, 0.0}});
  const ChartFactory charts = ansatz_charts(s.structure);
  SamplingOptions opts;
  opts.samples = 6;
  opts.seed = 7;
  const auto samples = sample_points(*s.angle, {Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones()},
                                     s.poles, opts);
  ToleranceTable table = ricci_tolerances(1e-4);
  table.emplace_back(identity::kRicciSymmetry, 1e-8);
  const VerificationReport r = verify_samples(
      charts, samples, {4, 1e-2}, table, kFibreInvariant,
      ansatz_admissible(s.angle, s.poles, 0.95, 0.15));
  CHECK(r.get(identity::kRicci).max < 1e-4);
  CHECK(r.get(identity::kRicciSymmetry).max < 1e-8);
  CHECK(r.pass());

  const PointAnalysis a = analyze_point(charts(samples[0]), samples[0], {4, 1e-2});
  CHECK(a.residuals.at(identity::kTorsionI) < 1e-6);
  CHECK(a.residuals.at(identity::kClosedTorsion) < 1e-8);
}

TEST_CASE("Ricci residual converges at the stencil order") {
  const Setup s = gh_setup(1.0, {{0.0, 0.0, 0.0}});
  const ChartFactory charts = ansatz_charts(s.structure);
  const Vec4 x(0.3, 0.4, -0.2, 0.3);
  const ChartField field = charts(x);
  for (int order : {2, 4}) {
    const double coarse = analyze_point(field, x, {order, 4e-2}).residuals.at(identity::kRicci);
    const double fine = analyze_point(field, x, {order, 2e-2}).residuals.at(identity::kRicci);
    CAPTURE(order);
    CHECK(coarse / fine >= 0.7 * std::pow(2.0, order));
  }
}

TEST_CASE("constructed soliton with a_- = 0 satisfies the soliton system") {
  const SolitonParams params = SolitonParams::make(1);
  const Setup s = soliton_setup(params, 1.0, 0.0, {{0.4, 0.2, 0.1}});
  SamplingOptions opts;
  opts.samples = 6;
  opts.seed = 3;
  const auto samples = sample_points(
      *s.angle, {Eigen::Vector3d::Zero(), Eigen::Vector3d(1.0, 0.6, 1.0)}, s.poles, opts);
  const Admissible ok = ansatz_admissible(s.angle, s.poles, 0.97, 0.15);
  const VerificationReport good = verify_samples(ansatz_charts(s.structure, params), samples,
                                                 {4, 5e-3}, soliton_tolerances(1e-4),
                                                 kFibreInvariant, ok);
  CHECK(good.get(identity::kEinstein).max < 1e-4);
  CHECK(good.get(identity::kBianchi).max < 1e-4);
  CHECK(good.pass());

  const VerificationReport doubled = verify_samples(ansatz_charts(s.structure, params, 2.0),
                                                    samples, {4, 5e-3}, soliton_tolerances(1e-4),
                                                    kFibreInvariant, ok);
  CHECK(doubled.get(identity::kEinstein).max > 1e-2);
  CHECK_FALSE(doubled.pass());
}

TEST_CASE("generalized Kaehler axioms hold with both angles active") {
  const SolitonParams params = SolitonParams::make(1, 1);
  const Setup s = soliton_setup(params, 4.0, 0.5, {{0.5, 0.1, -0.2}});
  SamplingOptions opts;
  opts.samples = 4;
  opts.seed = 11;
  const auto samples = sample_points(
      *s.angle, {Eigen::Vector3d::Zero(), Eigen::Vector3d(1.0, 0.6, 0.6)}, s.poles, opts);
  ToleranceTable table = gk_axiom_tolerances(1e-4, 1e-6);
  for (const auto& e : soliton_tolerances(1e-4)) table.push_back(e);
  const VerificationReport r =
      verify_samples(ansatz_charts(s.structure, params), samples, {4, 5e-3}, table,
                     kFibreInvariant, ansatz_admissible(s.angle, s.poles, 0.97, 0.15));
  for (const auto& stat : r.identities) {
    CAPTURE(stat.name);
    CAPTURE(stat.max);
    CHECK(stat.pass);
  }
  const auto j = r.to_json(true);
  CHECK(j["pass"].get<bool>());
  CHECK(j["identities"].size() == table.size());
  CHECK(j["points"].size() == samples.size());
  CHECK(j["identities"][0].contains("tolerance"));
}

TEST_CASE("sampler respects the angle bound and pole margin, deterministically") {
  const SolitonParams params = SolitonParams::make(1);
  auto angle = std::make_shared<SolitonAngle>(params);
  const std::vector<MomentPoint> poles{{0.0, 0.0, 0.0}};
  SamplingOptions opts;
  opts.samples = 300;
  opts.seed = 5;
  const SampleBox box{Eigen::Vector3d::Zero(), Eigen::Vector3d(1.0, 3.0, 1.0)};
  const auto a = sample_points(*angle, box, poles, opts);
  const auto b = sample_points(*angle, box, poles, opts);
  REQUIRE(a.size() == 300);
  CHECK(a == b);
  for (const auto& x : a) {
    const MomentPoint m{x[1], x[2], x[3]};
    CHECK(std::abs(angle->angle_value(m)) <= 0.95);
    CHECK(h_distance(*angle, m, poles[0]) >= 0.3);
    CHECK(x[0] >= 0.0);
    CHECK(x[0] < 2 * std::numbers::pi);
  }
  opts.seed = 6;
  CHECK(sample_points(*angle, box, poles, opts) != a);
  opts.max_angle = 1e-9;
  opts.max_attempts = 1000;
  CHECK_THROWS_AS(sample_points(*angle, {Eigen::Vector3d(0, 2, 0), Eigen::Vector3d::Constant(0.1)},
                                poles, opts),
                  DomainError);
}

TEST_CASE("W times h-distance tends to one half at a pole") {
  const SolitonParams params = SolitonParams::make(1, 1);
  const MomentPoint z{0.5, 0.1, -0.2};
  const std::vector<double> radii{0.1, 0.03, 0.01, 0.003, 0.001};
  const Setup s = soliton_setup(params, 4.0, 0.5, {z});
  const PoleAsymptotics a = pole_asymptotics(*s.angle, *s.w, z, radii);
  CAPTURE(a.limit);
  CHECK(a.limit == doctest::Approx(0.5).epsilon(0.02));
  CHECK(a.pass());

  const Setup twice = soliton_setup(params, 4.0, 0.5, {z}, 2.0);
  const PoleAsymptotics b = pole_asymptotics(*twice.angle, *twice.w, z, radii);
  CHECK(b.limit == doctest::Approx(1.0).epsilon(0.02));
  CHECK_FALSE(b.limit_ok);
  CHECK_THROWS_AS(pole_asymptotics(*s.angle, *s.w, z, {0.1}), InvalidParamsError);
}

TEST_CASE("value-only W-equation residual converges at the scheme order") {
  const SolitonParams params = SolitonParams::make(1, 2, 0, 1);
  const SolitonAngle angle(params);
  const BaselineField w0(params);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int order : {2, 4}) {
    double coarse = 0.0, fine = 0.0, extrapolated = 0.0;
    for (int n = 0; n < 200;) {
      const MomentPoint x{2.0 * u(rng), u(rng), u(rng)};
      if (std::abs(angle.angle_value(x)) > 0.95) continue;
      ++n;
      coarse = std::max(coarse, std::abs(w_equation_residual_fd(angle, w0, x, {order, 1e-2})));
      fine = std::max(fine, std::abs(w_equation_residual_fd(angle, w0, x, {order, 5e-3})));
      FdScheme rich{order, 1e-2};
      rich.richardson = true;
      extrapolated = std::max(extrapolated, std::abs(w_equation_residual_fd(angle, w0, x, rich)));
    }
    CAPTURE(order);
    CAPTURE(coarse);
    CAPTURE(fine);
    CHECK(coarse / fine > 0.7 * std::pow(2.0, order));
    CHECK(extrapolated < fine);
  }
  // a bump vanishing on the mu1 = 0.1 slice only adds its W_11
  const FunctionField bumped([&](const MomentPoint& x) {
    const MomentJet<Jet2> m = MomentJet<Jet2>::seeded(x);
    return w0.jet2(x) + 0.01 * (m.mu1 - 0.1) * (m.mu1 - 0.1);
  });
  CHECK(std::abs(w_equation_residual_fd(angle, bumped, {0.1, 0.2, 0.3}, {4, 1e-2})) ==
        doctest::Approx(0.02).epsilon(1e-6));
}
