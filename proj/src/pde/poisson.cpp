#include "pitt/pde/poisson.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <string>

namespace pitt::pde {

namespace {

bool is_neumann(const PoissonProblem& p, int edge) { return p.edges[edge].kind == BoundaryKind::neumann; }

// Owning condition of a boundary node: edge index, or -1 for a corner joining two Neumann edges.
int owning_edge(const PoissonProblem& p, int i, int j) {
  const bool on_left = j == 0, on_right = j == p.nx - 1, on_bottom = i == 0, on_top = i == p.ny - 1;
  const int xedge = on_left ? eqtok::left : (on_right ? eqtok::right : -1);
  const int yedge = on_bottom ? eqtok::bottom : (on_top ? eqtok::top : -1);
  if (xedge >= 0 && yedge >= 0) {
    if (!is_neumann(p, xedge)) return xedge;
    if (!is_neumann(p, yedge)) return yedge;
    return -1;
  }
  return xedge >= 0 ? xedge : yedge;
}

}  // namespace

void PoissonProblem::validate() const {
  if (nx < 3 || ny < 3) throw std::invalid_argument("poisson: grid must be at least 3 x 3");
  if (!g.empty() && g.size() != static_cast<std::size_t>(nx) * ny) throw std::invalid_argument("poisson: g has the wrong size");
  for (const auto& pl : plates) {
    if (pl.width < 1 || pl.x < 1 || pl.x + pl.width > nx - 1 || pl.y < 1 || pl.y > ny - 2) {
      throw std::invalid_argument("poisson: plate must lie strictly inside the domain");
    }
  }
}

std::vector<NodeRole> node_roles(const PoissonProblem& p) {
  p.validate();
  std::vector<NodeRole> role(static_cast<std::size_t>(p.nx) * p.ny, NodeRole::interior);
  bool any_dirichlet = false;
  for (int i = 0; i < p.ny; ++i)
    for (int j = 0; j < p.nx; ++j) {
      if (i != 0 && j != 0 && i != p.ny - 1 && j != p.nx - 1) continue;
      const int e = owning_edge(p, i, j);
      const bool dirichlet = e >= 0 && !is_neumann(p, e);
      any_dirichlet = any_dirichlet || dirichlet;
      role[static_cast<std::size_t>(i) * p.nx + j] = dirichlet ? NodeRole::dirichlet : NodeRole::neumann;
    }
  for (const auto& pl : p.plates)
    for (int j = pl.x; j < pl.x + pl.width; ++j) role[static_cast<std::size_t>(pl.y) * p.nx + j] = NodeRole::plate;
  if (!any_dirichlet && p.plates.empty()) role[0] = NodeRole::pinned;
  return role;
}

std::vector<double> boundary_field(const PoissonProblem& p) {
  std::vector<double> out(static_cast<std::size_t>(p.nx) * p.ny, 0.0);
  for (int i = 0; i < p.ny; ++i)
    for (int j = 0; j < p.nx; ++j) {
      if (i != 0 && j != 0 && i != p.ny - 1 && j != p.nx - 1) continue;
      const int e = owning_edge(p, i, j);
      const int xedge = j == 0 ? eqtok::left : eqtok::right;
      const int yedge = i == 0 ? eqtok::bottom : eqtok::top;
      out[static_cast<std::size_t>(i) * p.nx + j] =
          e >= 0 ? p.edges[e].value : 0.5 * (p.edges[xedge].value + p.edges[yedge].value);
    }
  for (const auto& pl : p.plates)
    for (int j = pl.x; j < pl.x + pl.width; ++j) out[static_cast<std::size_t>(pl.y) * p.nx + j] = pl.charge;
  return out;
}

double poisson_residual(const PoissonProblem& p, const std::vector<double>& u, const std::vector<NodeRole>& role) {
  const double inv_h2 = 1.0 / (p.h() * p.h());
  double worst = 0.0;
  for (int i = 1; i < p.ny - 1; ++i)
    for (int j = 1; j < p.nx - 1; ++j) {
      const auto k = static_cast<std::size_t>(i) * p.nx + j;
      if (role[k] != NodeRole::interior) continue;
      const double lap = (u[k - 1] + u[k + 1] + u[k - p.nx] + u[k + p.nx] - 4.0 * u[k]) * inv_h2;
      worst = std::max(worst, std::abs(lap - (p.g.empty() ? 0.0 : p.g[k])));
    }
  return worst;
}

PoissonSolution solve_poisson(const PoissonProblem& p, double tol, int max_refinements) {
  const auto role = node_roles(p);
  const auto data = boundary_field(p);
  const int nx = p.nx, ny = p.ny;
  const auto n = static_cast<Eigen::Index>(nx) * ny;
  const double h = p.h(), h2 = h * h;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 5);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nx; ++j) {
      const Eigen::Index k = static_cast<Eigen::Index>(i) * nx + j;
      switch (role[static_cast<std::size_t>(k)]) {
        case NodeRole::plate:
        case NodeRole::dirichlet:
          trip.emplace_back(k, k, 1.0);
          rhs[k] = data[static_cast<std::size_t>(k)];
          break;
        case NodeRole::pinned:
          trip.emplace_back(k, k, 1.0);
          break;
        case NodeRole::interior:
          trip.emplace_back(k, k, -4.0);
          trip.emplace_back(k, k - 1, 1.0);
          trip.emplace_back(k, k + 1, 1.0);
          trip.emplace_back(k, k - nx, 1.0);
          trip.emplace_back(k, k + nx, 1.0);
          rhs[k] = p.g.empty() ? 0.0 : h2 * p.g[static_cast<std::size_t>(k)];
          break;
        case NodeRole::neumann: {
          // (u_boundary - u_inward) / h = outward normal derivative.
          const int e = owning_edge(p, i, j);
          auto inward = [&](int edge) -> Eigen::Index {
            switch (edge) {
              case eqtok::left: return k + 1;
              case eqtok::right: return k - 1;
              case eqtok::bottom: return k + nx;
              default: return k - nx;
            }
          };
          if (e >= 0) {
            trip.emplace_back(k, k, 1.0);
            trip.emplace_back(k, inward(e), -1.0);
            rhs[k] = h * p.edges[e].value;
          } else {
            const int xe = j == 0 ? eqtok::left : eqtok::right;
            const int ye = i == 0 ? eqtok::bottom : eqtok::top;
            trip.emplace_back(k, k, 1.0);
            trip.emplace_back(k, inward(xe), -0.5);
            trip.emplace_back(k, inward(ye), -0.5);
            rhs[k] = h * 0.5 * (p.edges[xe].value + p.edges[ye].value);
          }
          break;
        }
      }
    }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw PoissonNotConverged("solve_poisson: factorization failed", INFINITY);

  Eigen::VectorXd x = lu.solve(rhs);
  PoissonSolution sol;
  sol.role = role;
  sol.u.assign(x.data(), x.data() + n);
  // Constrained values are imposed bit-exactly.
  auto impose = [&] {
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto r = role[static_cast<std::size_t>(k)];
      if (r == NodeRole::plate || r == NodeRole::dirichlet) sol.u[static_cast<std::size_t>(k)] = data[static_cast<std::size_t>(k)];
      if (r == NodeRole::pinned) sol.u[static_cast<std::size_t>(k)] = 0.0;
    }
  };
  impose();
  sol.residual = poisson_residual(p, sol.u, role);
  while (sol.residual > tol && sol.refinements < max_refinements) {
    Eigen::Map<const Eigen::VectorXd> cur(sol.u.data(), n);
    const Eigen::VectorXd r = rhs - A * cur;
    const Eigen::VectorXd dx = lu.solve(r);
    for (Eigen::Index k = 0; k < n; ++k) sol.u[static_cast<std::size_t>(k)] += dx[k];
    impose();
    ++sol.refinements;
    sol.residual = poisson_residual(p, sol.u, role);
  }
  if (!(sol.residual <= tol)) {
    throw PoissonNotConverged("solve_poisson: residual " + std::to_string(sol.residual) + " above tolerance " +
                                  std::to_string(tol) + " after " + std::to_string(sol.refinements) + " refinements",
                              sol.residual);
  }
  return sol;
}

std::vector<double> field_magnitude(const std::vector<double>& u, int nx, int ny, double h) {
  if (u.size() != static_cast<std::size_t>(nx) * ny || nx < 2 || ny < 2) throw std::invalid_argument("field_magnitude: bad shape");
  std::vector<double> out(u.size());
  auto at = [&](int i, int j) { return u[static_cast<std::size_t>(i) * nx + j]; };
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nx; ++j) {
      double dx, dy;
      if (j == 0) dx = (at(i, 1) - at(i, 0)) / h;
      else if (j == nx - 1) dx = (at(i, nx - 1) - at(i, nx - 2)) / h;
      else dx = (at(i, j + 1) - at(i, j - 1)) / (2.0 * h);
      if (i == 0) dy = (at(1, j) - at(0, j)) / h;
      else if (i == ny - 1) dy = (at(ny - 1, j) - at(ny - 2, j)) / h;
      else dy = (at(i + 1, j) - at(i - 1, j)) / (2.0 * h);
      out[static_cast<std::size_t>(i) * nx + j] = std::sqrt(dx * dx + dy * dy);
    }
  return out;
}

PoissonProblem sample_poisson_problem(Rng& rng, int bc_combo, const PlateSampling& cfg) {
  if (bc_combo < 0 || bc_combo > 15) throw std::invalid_argument("sample_poisson_problem: bc_combo must be in [0, 15]");
  PoissonProblem p;
  for (int e = 0; e < 4; ++e) {
    p.edges[e].kind = (bc_combo >> e) & 1 ? BoundaryKind::neumann : BoundaryKind::dirichlet;
    p.edges[e].value = rng.uniform(-cfg.edge_value_scale, cfg.edge_value_scale);
  }
  const int max_width = std::min(cfg.max_width, p.nx - 2 * cfg.margin);
  for (int k = 0; k < cfg.plates; ++k) {
    for (int attempt = 0;; ++attempt) {
      if (attempt > 1000) throw std::runtime_error("sample_poisson_problem: could not place plates");
      Plate pl;
      pl.width = rng.integer(cfg.min_width, max_width);
      pl.x = rng.integer(cfg.margin, p.nx - cfg.margin - pl.width);
      pl.y = rng.integer(cfg.margin, p.ny - 1 - cfg.margin);
      pl.charge = rng.uniform(-cfg.charge_scale, cfg.charge_scale);
      // Keep plates from touching one another.
      const bool clash = std::any_of(p.plates.begin(), p.plates.end(), [&](const Plate& o) {
        return std::abs(o.y - pl.y) < 2 && pl.x < o.x + o.width + 1 && o.x < pl.x + pl.width + 1;
      });
      if (!clash) {
        p.plates.push_back(pl);
        break;
      }
    }
  }
  return p;
}

}  // namespace pitt::pde
