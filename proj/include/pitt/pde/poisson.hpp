#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "pitt/eqtok/equation_spec.hpp"
#include "pitt/util/random.hpp"

namespace pitt::pde {

using eqtok::BoundaryKind;
using eqtok::EdgeCondition;
using eqtok::Plate;

inline constexpr int kPoissonNx = 100;
inline constexpr int kPoissonNy = 60;

/// Node-centred grid on [0, 1] x [0, (ny - 1) h] with h = 1 / (nx - 1).
/// Arrays are row-major [ny][nx]; row 0 is the bottom edge, column 0 the left edge.
struct PoissonProblem {
  int nx = kPoissonNx;
  int ny = kPoissonNy;
  std::array<EdgeCondition, 4> edges{};  // left, right, bottom, top
  std::vector<Plate> plates;
  std::vector<double> g;  // source, empty means zero

  double h() const { return 1.0 / (nx - 1); }
  /// Throws std::invalid_argument if a plate touches the boundary or sizes disagree.
  void validate() const;
};

/// How each node is constrained after precedence (plates, then Dirichlet, then Neumann).
enum class NodeRole : unsigned char { interior, plate, dirichlet, neumann, pinned };

struct PoissonSolution {
  std::vector<double> u;
  std::vector<NodeRole> role;
  double residual = 0.0;  // max |Lap_h u - g| over interior nodes
  int refinements = 0;
};

struct PoissonNotConverged : std::runtime_error {
  PoissonNotConverged(const std::string& what, double residual_)
      : std::runtime_error(what), residual(residual_) {}
  double residual;
};

/// Sparse direct solve of the 5-point Laplacian with plate constraints, first-order
/// one-sided Neumann rows, and iterative refinement until the residual is <= tol.
PoissonSolution solve_poisson(const PoissonProblem& p, double tol = 1e-8, int max_refinements = 5);

std::vector<NodeRole> node_roles(const PoissonProblem& p);
/// Value held by a Dirichlet/plate node (boundary data for Neumann nodes).
std::vector<double> boundary_field(const PoissonProblem& p);

/// max |Lap_h u - g| over interior nodes.
double poisson_residual(const PoissonProblem& p, const std::vector<double>& u, const std::vector<NodeRole>& role);

/// |grad u| by central differences, one-sided at the edges.
std::vector<double> field_magnitude(const std::vector<double>& u, int nx, int ny, double h);

struct PlateSampling {
  int plates = 2;
  int min_width = 10;
  int max_width = 40;
  int margin = 5;
  double charge_scale = 1.0;
  double edge_value_scale = 0.5;
};

/// Random plates plus per-edge values; the boundary kinds come from `bc_combo` (bit e set = Neumann).
PoissonProblem sample_poisson_problem(Rng& rng, int bc_combo, const PlateSampling& cfg = {});

}  // namespace pitt::pde
