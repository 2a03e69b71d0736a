#include "gkforge/grid_solve.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "gkforge/errors.hpp"

namespace gkforge {

void GridBox::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (nodes[a] < 3) throw InvalidParamsError("grid needs at least 3 nodes per axis");
    if (!(upper[a] > lower[a])) throw InvalidParamsError("grid box needs lower < upper");
  }
}

Eigen::Vector3d GridBox::spacing() const {
  return (upper - lower).cwiseQuotient(
      Eigen::Vector3d(nodes[0] - 1, nodes[1] - 1, nodes[2] - 1));
}

MomentPoint GridBox::node(int i, int j, int k) const {
  const Eigen::Vector3d h = spacing();
  return {lower[0] + i * h[0], lower[1] + j * h[1], lower[2] + k * h[2]};
}

bool GridBox::on_boundary(int i, int j, int k) const {
  return i == 0 || j == 0 || k == 0 || i == nodes[0] - 1 || j == nodes[1] - 1 ||
         k == nodes[2] - 1;
}

double GridSolution::min() const { return *std::min_element(values.begin(), values.end()); }

nlohmann::json GridSolution::header() const {
  const Eigen::Vector3d h = box.spacing();
  return {{"coordinates", {"mu1", "mu_plus", "mu_minus"}},
          {"lower", {box.lower[0], box.lower[1], box.lower[2]}},
          {"upper", {box.upper[0], box.upper[1], box.upper[2]}},
          {"nodes", {box.nodes[0], box.nodes[1], box.nodes[2]}},
          {"spacing", {h[0], h[1], h[2]}},
          {"ordering", "mu1 fastest, then mu_plus, then mu_minus"},
          {"iterations", iterations},
          {"solver_error", solver_error}};
}

void GridSolution::write_csv(std::ostream& out) const {
  out << "# " << header().dump() << '\n';
  out << "mu1,mu_plus,mu_minus,W\n";
  out << std::setprecision(17);
  for (int k = 0; k < box.nodes[2]; ++k)
    for (int j = 0; j < box.nodes[1]; ++j)
      for (int i = 0; i < box.nodes[0]; ++i) {
        const MomentPoint x = box.node(i, j, k);
        out << x.mu1 << ',' << x.mu_plus << ',' << x.mu_minus << ',' << at(i, j, k) << '\n';
      }
}

namespace {

// Coefficients (1 + p, 1 - p) at every node, with the angle margin enforced.
struct Coefficients {
  std::vector<double> plus, minus;
};

Coefficients coefficients(const AngleField& angle, const GridBox& box, double margin) {
  Coefficients c;
  c.plus.resize(box.size());
  c.minus.resize(box.size());
  for (int k = 0; k < box.nodes[2]; ++k)
    for (int j = 0; j < box.nodes[1]; ++j)
      for (int i = 0; i < box.nodes[0]; ++i) {
        const double p = angle.angle_value(box.node(i, j, k));
        if (!(std::abs(p) <= 1.0 - margin))
          throw DomainError("grid reaches |p| > 1 - margin; the discretization degenerates there");
        const std::size_t n = box.index(i, j, k);
        c.plus[n] = 1.0 + p;
        c.minus[n] = 1.0 - p;
      }
  return c;
}

// Stencil of the operator at an interior node: (neighbour index, weight) including the centre.
template <class F>
void stencil(const GridBox& box, const Coefficients& c, int i, int j, int k, F&& emit) {
  const Eigen::Vector3d h = box.spacing();
  const double w1 = 1.0 / (h[0] * h[0]);
  const double wp = 0.5 / (h[1] * h[1]);
  const double wm = 0.5 / (h[2] * h[2]);
  const std::size_t n = box.index(i, j, k);
  emit(n, -2.0 * w1 - 2.0 * wp * c.plus[n] - 2.0 * wm * c.minus[n]);
  for (const int s : {-1, 1}) {
    emit(box.index(i + s, j, k), w1);
    const std::size_t np = box.index(i, j + s, k);
    emit(np, wp * c.plus[np]);
    const std::size_t nm = box.index(i, j, k + s);
    emit(nm, wm * c.minus[nm]);
  }
}

}  // namespace

GridSolution grid_solve(const AngleField& angle, const GridBox& box, const BoundaryData& boundary,
                        const GridSolveOptions& options) {
  box.validate();
  if (!boundary) throw InvalidParamsError("grid solve needs boundary data");
  const Coefficients c = coefficients(angle, box, options.angle_margin);

  GridSolution out;
  out.box = box;
  out.values.assign(box.size(), 0.0);
  std::vector<long> unknown(box.size(), -1);
  long count = 0;
  for (int k = 0; k < box.nodes[2]; ++k)
    for (int j = 0; j < box.nodes[1]; ++j)
      for (int i = 0; i < box.nodes[0]; ++i) {
        const std::size_t n = box.index(i, j, k);
        if (box.on_boundary(i, j, k))
          out.values[n] = boundary(box.node(i, j, k));
        else
          unknown[n] = count++;
      }

  // Assemble -L so the matrix has a positive diagonal and nonpositive off-diagonals.
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(std::size_t(count) * 7);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(count);
  for (int k = 1; k < box.nodes[2] - 1; ++k)
    for (int j = 1; j < box.nodes[1] - 1; ++j)
      for (int i = 1; i < box.nodes[0] - 1; ++i) {
        const long row = unknown[box.index(i, j, k)];
        stencil(box, c, i, j, k, [&](std::size_t n, double weight) {
          if (unknown[n] >= 0)
            entries.emplace_back(row, unknown[n], -weight);
          else
            rhs[row] += weight * out.values[n];
        });
      }
  Eigen::SparseMatrix<double> matrix(count, count);
  matrix.setFromTriplets(entries.begin(), entries.end());
  matrix.makeCompressed();

  Eigen::VectorXd solution;
  if (options.solver == GridSolver::SparseLu) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(matrix);
    if (lu.info() != Eigen::Success) throw ConvergenceError("sparse LU factorization failed");
    solution = lu.solve(rhs);
    out.solver_error = (matrix * solution - rhs).norm() / std::max(rhs.norm(), 1e-300);
  } else {
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> solver;
    solver.setTolerance(options.tolerance);
    solver.setMaxIterations(options.max_iterations);
    solver.compute(matrix);
    if (solver.info() != Eigen::Success) throw ConvergenceError("grid preconditioner setup failed");
    solution = solver.solve(rhs);
    out.iterations = static_cast<int>(solver.iterations());
    out.solver_error = solver.error();
    if (solver.info() != Eigen::Success || !(solver.error() <= options.tolerance))
      throw ConvergenceError("BiCGSTAB did not reach the grid tolerance");
  }
  for (std::size_t n = 0; n < box.size(); ++n)
    if (unknown[n] >= 0) out.values[n] = solution[unknown[n]];
  return out;
}

double grid_residual(const AngleField& angle, const GridSolution& solution) {
  const GridBox& box = solution.box;
  const Coefficients c = coefficients(angle, box, 0.0);
  double worst = 0.0;
  for (int k = 1; k < box.nodes[2] - 1; ++k)
    for (int j = 1; j < box.nodes[1] - 1; ++j)
      for (int i = 1; i < box.nodes[0] - 1; ++i) {
        double r = 0.0;
        stencil(box, c, i, j, k, [&](std::size_t n, double w) { r += w * solution.values[n]; });
        worst = std::max(worst, std::abs(r));
      }
  return worst;
}

}  // namespace gkforge
