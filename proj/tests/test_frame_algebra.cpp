#include <cmath>

#include "doctest.h"
#include "gkforge/errors.hpp"
#include "gkforge/frame_algebra.hpp"
#include "test_support.hpp"

using namespace gkforge;
using testing_support::uniform;

namespace {

// Laplace expansion along the first row; independent of Eigen's LU.
double cofactor_det(const Eigen::MatrixXd& m) {
  const auto n = m.rows();
  if (n == 1) return m(0, 0);
  double det = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::MatrixXd minor(n - 1, n - 1);
    for (Eigen::Index i = 1; i < n; ++i)
      for (Eigen::Index j = 0, k = 0; j < n; ++j)
        if (j != c) minor(i - 1, k++) = m(i, j);
    det += ((c % 2 == 0) ? 1.0 : -1.0) * m(0, c) * cofactor_det(minor);
  }
  return det;
}

}  // namespace

TEST_CASE("hyperkaehler point has a flat metric and quaternion relations") {
  const FrameTensors t = frame_tensors(AngleValue(0.0));
  CHECK((t.g - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((t.I * t.J - t.K).cwiseAbs().maxCoeff() == 0.0);
  CHECK((t.J * t.I + t.K).cwiseAbs().maxCoeff() == 0.0);
  CHECK((t.K * t.K + Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("metric entries at p = 0.5") {
  const FrameTensors t = frame_tensors(AngleValue(0.5));
  CHECK(t.g(1, 0) == 0.0);
  CHECK(t.g(1, 1) == 1.0);
  CHECK(t.g(1, 2) == 0.5);
  CHECK(t.g(1, 3) == 0.0);
  CHECK(t.g(3, 3) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("Omega is the same constant matrix for every angle") {
  for (double p : {-0.99, -0.3, 0.0, 0.42, 0.999}) {
    const FrameTensors t = frame_tensors(AngleValue(p));
    CHECK(t.Omega(0, 3) == -1.0);
    CHECK(t.Omega(1, 2) == -1.0);
    CHECK(t.Omega(2, 1) == 1.0);
    CHECK(t.Omega(3, 0) == 1.0);
    CHECK(t.Omega.cwiseAbs().sum() == 4.0);
  }
}

TEST_CASE("identity residuals at selected angles") {
  {
    const AngleValue p(0.3);
    const auto r = check_frame_identities(frame_tensors(p), p, 1e-13);
    CHECK(r.pass());
  }
  {
    const AngleValue p(0.0);
    const auto r = check_frame_identities(frame_tensors(p), p, 1e-13);
    CHECK(r.get("K_squared") == 0.0);
  }
  {
    const AngleValue p(-0.9);
    const auto r = check_frame_identities(frame_tensors(p), p, 1e-13);
    CHECK(r.get("I_orthogonal") < 1e-13);
    CHECK(r.pass());
  }
}

TEST_CASE("degenerate angles are rejected") {
  CHECK_THROWS_AS(AngleValue(1.0), DegenerateAngleError);
  CHECK_THROWS_AS(AngleValue(-1.0), DegenerateAngleError);
  CHECK_THROWS_AS(AngleValue(1.0 - 1e-13), DegenerateAngleError);
  CHECK_THROWS_AS(AngleValue(std::nan("")), DegenerateAngleError);
  CHECK_NOTHROW(AngleValue(0.999999));
}

TEST_CASE("property: det g = (1 - p^2)^2 by cofactor expansion") {
  for (int i = 0; i < 500; ++i) {
    const double p = uniform(-0.999, 0.999);
    const FrameTensors t = frame_tensors(AngleValue(p));
    CHECK(cofactor_det(t.g) == doctest::Approx((1 - p * p) * (1 - p * p)).epsilon(1e-12));
  }
}

TEST_CASE("property: operators are invariant under uniform rescaling of the frame") {
  for (int i = 0; i < 100; ++i) {
    const double p = uniform(-0.99, 0.99);
    const double lambda = uniform(0.1, 10.0);
    const FrameTensors t = frame_tensors(AngleValue(p));
    const Eigen::Matrix4d s = lambda * Eigen::Matrix4d::Identity();
    const Eigen::Matrix4d si = s.inverse();
    CHECK((si * t.I * s - t.I).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((si * t.J * s - t.J).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((si * t.K * s - t.K).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((s.transpose() * t.g * s - lambda * lambda * t.g).cwiseAbs().maxCoeff() <
          1e-12 * lambda * lambda);
  }
}

TEST_CASE("property: the Poisson bivector inverts Omega") {
  for (int i = 0; i < 1000; ++i) {
    const double p = uniform(-0.999, 0.999);
    const FrameTensors t = frame_tensors(AngleValue(p));
    const Eigen::Matrix4d sigma = poisson_bivector(t.g, t.I, t.J);
    CHECK((sigma + sigma.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((sigma * t.Omega.transpose() - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() <
          1e-10);
  }
}

TEST_CASE("property: every identity holds across the open interval") {
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const AngleValue p(uniform(-0.999, 0.999));
    worst = std::max(worst, check_frame_identities(frame_tensors(p), p, 1e-12).max());
  }
  CHECK(worst < 1e-12);
}
