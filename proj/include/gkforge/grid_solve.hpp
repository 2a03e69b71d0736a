#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "gkforge/moment_space.hpp"

namespace gkforge {

// Axis-aligned box in (mu1, mu_+, mu_-) with nodes on the boundary.
struct GridBox {
  Eigen::Vector3d lower = -Eigen::Vector3d::Ones();
  Eigen::Vector3d upper = Eigen::Vector3d::Ones();
  std::array<int, 3> nodes{17, 17, 17};  // per axis, including both boundary nodes

  void validate() const;
  Eigen::Vector3d spacing() const;
  std::size_t size() const { return std::size_t(nodes[0]) * nodes[1] * nodes[2]; }
  // mu1 runs fastest.
  std::size_t index(int i, int j, int k) const { return i + std::size_t(nodes[0]) * (j + std::size_t(nodes[1]) * k); }
  MomentPoint node(int i, int j, int k) const;
  bool on_boundary(int i, int j, int k) const;
};

enum class GridSolver { BiCgStab, SparseLu };

struct GridSolveOptions {
  GridSolver solver = GridSolver::BiCgStab;
  double tolerance = 1e-12;  // relative residual of the linear system
  int max_iterations = 20000;
  double angle_margin = 1e-3;  // nodes need |p| <= 1 - angle_margin
};

struct GridSolution {
  GridBox box;
  std::vector<double> values;  // box.index ordering
  int iterations = 0;
  double solver_error = 0.0;

  double at(int i, int j, int k) const { return values[box.index(i, j, k)]; }
  double min() const;
  nlohmann::json header() const;
  // First line "# " + header JSON, then "mu1,mu_plus,mu_minus,W" and one row per node.
  void write_csv(std::ostream& out) const;
};

using BoundaryData = std::function<double(const MomentPoint&)>;

// Second-order flux-difference discretization of
// W_11 + 1/2((1+p)W)_{++} + 1/2((1-p)W)_{--} = 0 with Dirichlet data on the box boundary.
GridSolution grid_solve(const AngleField& angle, const GridBox& box, const BoundaryData& boundary,
                        const GridSolveOptions& options = {});

// Max over interior nodes of the discrete operator applied to the stored values.
double grid_residual(const AngleField& angle, const GridSolution& solution);

}  // namespace gkforge
