#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace gkforge {

// Pointwise angle between the two complex structures, strictly inside (-1, 1).
class AngleValue {
 public:
  static constexpr double kMargin = 1e-12;

  explicit AngleValue(double p);
  double value() const { return p_; }

 private:
  double p_;
};

// g, I, J, K, Omega in the frame (Z, IZ, JZ, KZ); operators act on column vectors.
struct FrameTensors {
  Eigen::Matrix4d g;
  Eigen::Matrix4d I;
  Eigen::Matrix4d J;
  Eigen::Matrix4d K;
  Eigen::Matrix4d Omega;
};

FrameTensors frame_tensors(AngleValue p);

// Poisson bivector 1/2 [I,J] g^{-1}, with the index raised on the right.
Eigen::Matrix4d poisson_bivector(const Eigen::Matrix4d& g, const Eigen::Matrix4d& I,
                                 const Eigen::Matrix4d& J);

struct ResidualEntry {
  std::string name;
  double value = 0.0;
};

struct IdentityResiduals {
  std::vector<ResidualEntry> entries;
  double tolerance = 0.0;

  double max() const;
  bool pass() const { return max() < tolerance; }
  double get(const std::string& name) const;
};

IdentityResiduals check_frame_identities(const FrameTensors& t, AngleValue p, double tol);

}  // namespace gkforge
