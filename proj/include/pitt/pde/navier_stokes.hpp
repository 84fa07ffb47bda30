#pragma once

#include <stdexcept>
#include <vector>

namespace pitt::pde {

struct NSOptions {
  int n = 256;          // simulation grid (power of two)
  int save_n = 64;      // saved grid; n must be a multiple
  double t_final = 30.0;
  int frames = 120;     // saved intervals; frames + 1 snapshots including t = 0
  double cfl = 0.5;
  double dt_max = 0.05;
};

struct NSTrajectory {
  int save_n = 0;
  int frames = 0;
  std::vector<double> w;  // (frames + 1) x save_n x save_n
  std::vector<double> t;
  double nu = 0.0;
  double amp = 0.0;
  std::vector<double> w0;  // initial vorticity on the simulation grid
  long steps = 0;
  double max_cfl = 0.0;
};

struct NSBlowUp : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Forcing A (sin(2 pi (x1 + x2)) + cos(2 pi (x1 + x2))) on an n x n periodic unit grid.
std::vector<double> ns_forcing(int n, double amp);

struct Velocity {
  std::vector<double> u, v;
};
/// Velocity from the stream function psi with -Lap psi = w: u = d psi / dy, v = -d psi / dx.
Velocity velocity_from_vorticity(const std::vector<double>& w, int n);
/// Spectral divergence du/dx + dv/dy on the periodic grid.
std::vector<double> spectral_divergence(const Velocity& vel, int n);

/// Pseudo-spectral vorticity solver: 2/3-dealiased advection with low-storage RK3 and
/// Crank-Nicolson diffusion, step set by the CFL target, snapshots strided down to save_n.
NSTrajectory solve_ns(double nu, double amp, const std::vector<double>& w0, const NSOptions& opts = {});

/// Benchmark viscosity grid {1,...,9} x 10^-9 .. 10^-6 and 10^-5 (37 values).
std::vector<double> paper_viscosities();
/// Benchmark amplitude grid 0.001 .. 0.01 (10 values).
std::vector<double> paper_amplitudes();

}  // namespace pitt::pde
