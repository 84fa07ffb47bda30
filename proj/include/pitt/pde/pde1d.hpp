#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pitt/eqtok/equation_spec.hpp"
#include "pitt/util/random.hpp"

namespace pitt::pde {

using eqtok::EquationSpec;
using eqtok::ForcingParams;

eqtok::ForcingParams sample_forcing(Rng& rng, int terms = 5, double domain_length = 16.0);

std::vector<double> forcing_eval(const ForcingParams& p, double t, std::span<const double> x);

struct Solver1DOptions {
  int nx = 100;
  int nt = 100;
  double t_final = 4.0;
  int internal_points = 256;
  /// Upper bound on the internal step; the CFL limit of the advective flux may shrink it.
  double dt_max = 0.01;
  double cfl = 0.4;
  /// Replaces u(0, .) = delta(0, .) when set (used for closed-form checks).
  std::function<double(double)> initial;
};

struct Trajectory1D {
  int nt = 0;
  int nx = 0;
  std::vector<double> u;  // (nt + 1) x nx, row per saved frame
  std::vector<double> x;
  std::vector<double> t;
  EquationSpec spec;
  int internal_steps = 0;

  double at(int frame, int i) const { return u[static_cast<std::size_t>(frame) * nx + i]; }
  std::span<const double> frame(int n) const {
    return std::span<const double>(u).subspan(static_cast<std::size_t>(n) * nx, static_cast<std::size_t>(nx));
  }
};

struct SolverBlowUp : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Pseudo-spectral integrating-factor RK4 solve of
/// u_t + (alpha u^2 - beta u_x + gamma u_xx)_x = delta(t, x) on a periodic domain.
Trajectory1D solve_1d(const EquationSpec& spec, const Solver1DOptions& opts = {});

/// Benchmark parameter sets for each 1D family: (alpha, beta, gamma) combinations.
struct Coefficients {
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
};
std::vector<Coefficients> paper_parameter_grid(eqtok::Family family);

}  // namespace pitt::pde
