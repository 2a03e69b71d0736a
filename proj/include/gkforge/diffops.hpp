#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gkforge/forms.hpp"
#include "gkforge/gk_assembly.hpp"

namespace gkforge {

struct FdScheme {
  int order = 4;  // 2 or 4
  double step = 5e-3;
  bool richardson = false;
  int max_shrinks = 4;  // step halvings allowed when a stencil point is inadmissible

  void validate() const;
};

// Coordinates along which every field is known to be constant (the fibre coordinate);
// derivatives in these directions are exactly zero and are not sampled.
using DirectionMask = std::array<bool, 4>;
inline constexpr DirectionMask kFibreInvariant{false, true, true, true};
inline constexpr DirectionMask kAllDirections{true, true, true, true};

// Value, gradient and Hessian of a vector-valued function at one point.
struct DerivativeSet {
  Eigen::VectorXd value;
  std::array<Eigen::VectorXd, 4> d1;
  std::array<std::array<Eigen::VectorXd, 4>, 4> d2;
  double step = 0.0;  // step actually used
};

using VectorFunction = std::function<Eigen::VectorXd(const Eigen::Vector4d&)>;
using Admissible = std::function<bool(const Eigen::Vector4d&)>;

// Central-difference stencil (order 2 or 4) with optional Richardson extrapolation over
// step and step/2. Inadmissible stencil points shrink the step; out of shrinks -> StencilError.
DerivativeSet differentiate(const VectorFunction& f, const Eigen::Vector4d& x,
                            const FdScheme& scheme, const DirectionMask& active = kFibreInvariant,
                            const Admissible& admissible = {});

// W_11 + 1/2((1+p)W)_{++} + 1/2((1-p)W)_{--} from values only, by central differences.
double w_equation_residual_fd(const AngleField& angle, const ScalarField& w, const MomentPoint& x,
                              const FdScheme& scheme = {4, 1e-2});

// Rank-3 and rank-4 component arrays, index order as written.
using Christoffel = std::array<double, 64>;  // Gamma^a_{bc} at [16a + 4b + c]
using Riemann = std::array<double, 256>;     // R^a_{bcd} at [64a + 16b + 4c + d]

struct CurvatureTensors {
  Christoffel christoffel{};
  Riemann riemann{};
  Eigen::Matrix4d ricci = Eigen::Matrix4d::Zero();
  double scalar = 0.0;
  double bianchi_residual = 0.0;  // max |R^a_{bcd} + R^a_{cdb} + R^a_{dbc}|
  double step = 0.0;
};

using MetricFunction = std::function<Eigen::Matrix4d(const Eigen::Vector4d&)>;
CurvatureTensors curvature_tensors(const MetricFunction& g, const Eigen::Vector4d& x,
                                   const FdScheme& scheme,
                                   const DirectionMask& active = kFibreInvariant,
                                   const Admissible& admissible = {});

// (H^2)_{ij} = H_{ikl} H_j^{kl}.
Eigen::Matrix4d h_squared(const ThreeForm4& h, const Eigen::Matrix4d& g);

// Everything the verifiers need at one chart point.
struct PointFields {
  Eigen::Matrix4d g = Eigen::Matrix4d::Identity();
  ThreeForm4 torsion;
  double potential = 0.0;  // soliton potential f
  Eigen::Matrix4d I = Eigen::Matrix4d::Zero();
  Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
  Eigen::Matrix4cd hol_i = Eigen::Matrix4cd::Zero();
  Eigen::Matrix4cd hol_j = Eigen::Matrix4cd::Zero();
};

using ChartField = std::function<PointFields(const Eigen::Vector4d&)>;
// A chart adapted to a sample point (for the ansatz: gauge potential based at the sample).
using ChartFactory = std::function<ChartField(const Eigen::Vector4d& centre)>;

// Pointwise residuals, all max-norms of component arrays.
struct PointAnalysis {
  Eigen::Matrix4d ricci = Eigen::Matrix4d::Zero();
  Eigen::Matrix4d einstein = Eigen::Matrix4d::Zero();  // Rc - H^2/4 + Hess f
  Eigen::Matrix4d bianchi = Eigen::Matrix4d::Zero();   // d*H + i_{grad f} H
  std::map<std::string, double> residuals;
  double step = 0.0;
};

PointAnalysis analyze_point(const ChartField& field, const Eigen::Vector4d& x,
                            const FdScheme& scheme, const DirectionMask& active = kFibreInvariant,
                            const Admissible& admissible = {});

// Identity names produced by analyze_point.
namespace identity {
inline constexpr const char* kEinstein = "soliton_einstein";
inline constexpr const char* kBianchi = "soliton_bianchi";
inline constexpr const char* kRicci = "ricci";
inline constexpr const char* kRicciSymmetry = "ricci_symmetry";
inline constexpr const char* kHolomorphicI = "d_Omega_I";
inline constexpr const char* kHolomorphicJ = "d_Omega_J";
inline constexpr const char* kNijenhuisI = "nijenhuis_I";
inline constexpr const char* kNijenhuisJ = "nijenhuis_J";
inline constexpr const char* kTorsionI = "torsion_two_path_I";
inline constexpr const char* kTorsionJ = "torsion_two_path_J";
inline constexpr const char* kClosedTorsion = "dH";
inline constexpr const char* kRealPartsAgree = "re_Omega_I_minus_re_Omega_J";
inline constexpr const char* kTypeI = "Omega_I_type";  // Omega_I is (2,0) for I
inline constexpr const char* kTypeJ = "Omega_J_type";
}  // namespace identity

struct IdentityStat {
  std::string name;
  double max = 0.0;
  double mean = 0.0;
  std::size_t n = 0;
  double step = 0.0;
  int order = 0;
  double tolerance = 0.0;
  bool pass = false;
};

struct PointRecord {
  Eigen::Vector4d x;
  std::map<std::string, double> values;
};

struct VerificationReport {
  std::vector<IdentityStat> identities;
  std::vector<PointRecord> points;

  bool pass() const;
  const IdentityStat& get(const std::string& name) const;
  nlohmann::json to_json(bool include_points = false) const;
};

// Which identities to aggregate and their tolerances.
using ToleranceTable = std::vector<std::pair<std::string, double>>;
ToleranceTable soliton_tolerances(double tol = 1e-4);
ToleranceTable gk_axiom_tolerances(double tol = 1e-4, double closed_torsion_tol = 1e-6,
                                   double type_tol = 1e-9);
ToleranceTable ricci_tolerances(double tol = 1e-4);

VerificationReport verify_samples(const ChartFactory& charts,
                                  const std::vector<Eigen::Vector4d>& samples,
                                  const FdScheme& scheme, const ToleranceTable& identities,
                                  const DirectionMask& active = kFibreInvariant,
                                  const Admissible& admissible = {});

// Chart fields of the ansatz: g, I, J from the frame, Omega_I, Omega_J from the coframe, H = -*theta_I,
// f = potential_scale * soliton potential (0 without soliton parameters).
ChartFactory ansatz_charts(const GkStructure& structure,
                           std::optional<SolitonParams> soliton = std::nullopt,
                           double potential_scale = 1.0);

// Rejection sampling in a box of moment space: |p| <= max_angle, and every pole at
// h-distance >= pole_margin (h taken at the midpoint of the segment).
struct SamplingOptions {
  std::size_t samples = 200;
  std::uint64_t seed = 1;
  double max_angle = 0.95;
  double pole_margin = 0.3;
  std::size_t max_attempts = 1000000;
};

struct SampleBox {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d half_width = Eigen::Vector3d::Ones();
};

double h_distance(const AngleField& angle, const MomentPoint& a, const MomentPoint& b);

std::vector<Eigen::Vector4d> sample_points(const AngleField& angle, const SampleBox& box,
                                           const std::vector<MomentPoint>& poles,
                                           const SamplingOptions& options);

// Admissibility predicate matching the sampler's guards with a reduced margin for stencils.
Admissible ansatz_admissible(std::shared_ptr<const AngleField> angle,
                             std::vector<MomentPoint> poles, double max_angle,
                             double pole_margin);

// W * d_h(x, z) along rays into a pole, and r^3 |dW|_h.
struct PoleRadiusStat {
  double radius = 0.0;
  double w_times_distance = 0.0;  // mean over rays
  double spread = 0.0;            // max deviation over rays
  double gradient_decay = 0.0;    // max over rays of r^3 |dW|_h
};

struct PoleAsymptotics {
  std::vector<PoleRadiusStat> radii;  // decreasing radius
  double limit = 0.0;                 // value at the smallest radius
  double tolerance = 0.02;
  bool limit_ok = false;     // two smallest radii within tolerance of 1/2
  bool gradient_ok = false;  // r^3 |dW|_h decreasing towards the pole
  bool pass() const { return limit_ok && gradient_ok; }
};

PoleAsymptotics pole_asymptotics(const AngleField& angle, const ScalarField& w,
                                 const MomentPoint& pole, const std::vector<double>& radii,
                                 int rays = 6, double tolerance = 0.02);

}  // namespace gkforge
