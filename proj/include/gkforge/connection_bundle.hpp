#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <vector>

#include "gkforge/moment_space.hpp"
#include "gkforge/w_solutions.hpp"

namespace gkforge {

// Hodge star of a 1-form on moment space for h, oriented so that dmu1^dmu2^dmu3 is positive
// (dmu1^dmu_+^dmu_- is then negatively oriented).
TwoForm3 hodge_star_h(const BaseMetric& h, const Eigen::Vector3d& one_form);

// beta = *_h dW + W beta_0 in the (dmu1, dmu_+, dmu_-) basis.
TwoForm3 curvature(const AngleField& angle, const ScalarField& w, const MomentPoint& x);

// Independent path: the (mu1, mu2, mu3) component formulas beta_23 = W_1,
// beta_31 = W_2 + (pW)_3, beta_12 = W_3 + (pW)_2, converted to the (mu1, mu_+, mu_-) basis.
TwoForm3 curvature_from_components(const AngleField& angle, const ScalarField& w,
                                   const MomentPoint& x);

// Radial-homotopy primitive A of beta on a star-shaped chart around base:
// A_j(x) = int_0^1 s (x - base)^i beta_ij(base + s (x - base)) ds.
class GaugePotential {
 public:
  GaugePotential(std::shared_ptr<const AngleField> angle, std::shared_ptr<const ScalarField> w,
                 MomentPoint base, std::vector<MomentPoint> poles = {}, int order = 32,
                 Eigen::Vector3d closed_shift = Eigen::Vector3d::Zero());

  // Potential with the index on dmu1, dmu_+, dmu_-.
  Eigen::Vector3d operator()(const MomentPoint& x) const;

  const MomentPoint& base() const { return base_; }
  // Same data, new base point (charts are recentred per sample).
  GaugePotential recentred(const MomentPoint& base) const;

 private:
  std::shared_ptr<const AngleField> angle_;
  std::shared_ptr<const ScalarField> w_;
  MomentPoint base_;
  std::vector<MomentPoint> poles_;
  int order_;
  Eigen::Vector3d closed_shift_;
};

// Closed 1-form encoding the holonomy parameter h in [0, 1) on the Z-quotient model:
// 2 pi h / c dmu_-, flat with holonomy exp(2 pi i h) around the deck loop.
Eigen::Vector3d holonomy_shift(const OrbifoldModel& model, double holonomy);

struct SphereQuadrature {
  int n_theta = 48;
  int n_phi = 96;
};

struct FluxResult {
  double value = 0.0;
  double error_estimate = 0.0;  // difference to the half-resolution rule
};

// Flux of beta through the h(center)-round sphere of radius r, oriented as the boundary of
// the enclosed ball in the dmu1^dmu2^dmu3 orientation.
FluxResult flux(const AngleField& angle, const ScalarField& w, const MomentPoint& center,
                double radius, const SphereQuadrature& quad = {},
                const std::vector<MomentPoint>& poles = {});

struct SeifertResult {
  double value = 0.0;          // S(W)
  double label_offset = 0.0;   // l_+/k_+ + l_-/k_-
  double nearest_integer = 0.0;
  double distance = 0.0;       // |S - offset - nearest integer|
  double sphere_radius = 0.0;  // radius of the cross-section in (rho1, rho2)
  double tolerance = 0.0;
  bool integral = false;
};

// S(W) = (1/2pi) int_{S_0} beta over the cross-section rho1^2 + rho2^2 = r^2 of the cone model,
// oriented by -dchi^dmu1 with rho1 = r cos(chi), rho2 = r sin(chi). The sphere is placed
// inside every pole (r = half the smallest pole radius).
SeifertResult seifert_invariant(const SolitonParams& params, const AngleField& angle,
                                const ScalarField& w, const std::vector<MomentPoint>& poles,
                                double tol = 1e-6, const SphereQuadrature& quad = {});

}  // namespace gkforge
