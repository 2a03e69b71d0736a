#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gkforge/jet.hpp"
#include "gkforge/moment_space.hpp"
#include "gkforge/quadrature.hpp"

namespace gkforge {

// A scalar function on moment space evaluable with exact derivatives.
class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual double value(const MomentPoint& x) const = 0;
  virtual Jet1 jet1(const MomentPoint& x) const = 0;
  virtual Jet2 jet2(const MomentPoint& x) const = 0;
};

// Wraps a second-order jet evaluator; value and jet1 are truncations.
class FunctionField final : public ScalarField {
 public:
  using Evaluator = std::function<Jet2(const MomentPoint&)>;
  explicit FunctionField(Evaluator f) : f_(std::move(f)) {}
  double value(const MomentPoint& x) const override { return f_(x).v; }
  Jet1 jet1(const MomentPoint& x) const override;
  Jet2 jet2(const MomentPoint& x) const override { return f_(x); }

 private:
  Evaluator f_;
};

// W0 = (a_+^2 (1 + p) + a_-^2 (1 - p))^{-1}.
class BaselineField final : public ScalarField {
 public:
  explicit BaselineField(SolitonParams params) : params_(params) {}
  double value(const MomentPoint& x) const override;
  Jet1 jet1(const MomentPoint& x) const override;
  Jet2 jet2(const MomentPoint& x) const override;

 private:
  SolitonParams params_;
};

double baseline(const SolitonParams& params, const MomentPoint& x);

// G0 = k_+^2 e^{2 mu_+/k_+} + k_-^2 e^{-2 mu_-/k_-}; needs a_- != 0.
class AnomalousField final : public ScalarField {
 public:
  explicit AnomalousField(SolitonParams params);
  double value(const MomentPoint& x) const override;
  Jet1 jet1(const MomentPoint& x) const override;
  Jet2 jet2(const MomentPoint& x) const override;

 private:
  SolitonParams params_;
};

double anomalous(const SolitonParams& params, const MomentPoint& x);

// Constant kappa with Laplacian(kappa / r^2) = -2 pi delta on flat R^4, obtained from a
// divergence-theorem quadrature of the normal derivative of 1/r^2 over a 3-sphere.
double derive_flat_kernel_constant(double sphere_radius, int nodes);
double flat_kernel_constant();

enum class GreenMode {
  ClosedForm,  // lattice sum resummed in closed form (production)
  ImageSum,    // truncated image sum with certified tail bound (oracle; a_- = 0 only)
};

struct GreenOptions {
  GreenMode mode = GreenMode::ClosedForm;
  int images = 0;            // image-sum truncation K; 0 picks the smallest K meeting tail_tolerance
  double tail_tolerance = 1e-10;
  int max_images = 1 << 22;
  PeriodicQuadratureOptions quadrature{};
};

// Normalized Green's function G_z of the h-tilde Laplacian: G ~ 1/(2 d_h-tilde(x, z)) at z,
// evaluated as an S^1-orbit average of the flat R^4 kernel on the flat cover.
class GreenFunction final : public ScalarField {
 public:
  GreenFunction(const OrbifoldModel& model, const MomentPoint& pole, GreenOptions options = {});
  ~GreenFunction() override;
  GreenFunction(const GreenFunction&);
  GreenFunction& operator=(const GreenFunction&) = delete;

  double value(const MomentPoint& x) const override;
  Jet1 jet1(const MomentPoint& x) const override;
  Jet2 jet2(const MomentPoint& x) const override;

  const MomentPoint& pole() const { return pole_; }
  // Upper bound of the omitted image tail for ImageSum mode (0 in closed form).
  double tail_bound() const;

 private:
  struct Impl;
  MomentPoint pole_;
  std::unique_ptr<Impl> impl_;
};

double green(const OrbifoldModel& model, const MomentPoint& pole, const MomentPoint& x,
             const GreenOptions& options = {});

// c_z = psi(z) / W0(z): the weight that makes the flux of beta around z equal -2 pi.
double pole_weight(const SolitonParams& params, const MomentPoint& z);

struct PoleTerm {
  MomentPoint location;
  std::optional<double> weight;  // defaults to pole_weight(location)
};

struct SuperpositionSpec {
  double lambda = 1.0;
  double lambda0 = 0.0;
  std::vector<PoleTerm> poles;
  bool allow_incomplete = false;
  double pole_margin = 1e-6;  // minimal model radius of a pole
  GreenOptions green{};
};

// W = W0 (lambda + lambda0 G0 + sum c_z G_z).
class ScalarSolution final : public ScalarField {
 public:
  struct Pole {
    MomentPoint location;
    double weight;
  };

  double value(const MomentPoint& x) const override;
  Jet1 jet1(const MomentPoint& x) const override;
  Jet2 jet2(const MomentPoint& x) const override;

  // V = W / W0.
  double ratio(const MomentPoint& x) const;

  const SolitonParams& params() const { return model_.params; }
  const OrbifoldModel& model() const { return model_; }
  double lambda() const { return lambda_; }
  double lambda0() const { return lambda0_; }
  const std::vector<Pole>& poles() const { return poles_; }
  std::vector<std::string> warnings() const { return warnings_; }

  friend ScalarSolution superpose(const OrbifoldModel& model, const SuperpositionSpec& spec);

 private:
  explicit ScalarSolution(const OrbifoldModel& model) : model_(model) {}

  template <class T>
  T evaluate(const MomentPoint& x) const;

  OrbifoldModel model_;
  double lambda_ = 0.0;
  double lambda0_ = 0.0;
  std::vector<Pole> poles_;
  std::vector<GreenFunction> greens_;
  std::vector<std::string> warnings_;
};

ScalarSolution superpose(const OrbifoldModel& model, const SuperpositionSpec& spec);

// Residual of W_11 + 1/2((1+p)W)_{++} + 1/2((1-p)W)_{--} from exact second jets.
double w_equation_residual(const AngleField& angle, const ScalarField& w, const MomentPoint& x);

}  // namespace gkforge
