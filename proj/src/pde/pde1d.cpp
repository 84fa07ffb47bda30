#include "pitt/pde/pde1d.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "pitt/pde/fft.hpp"

namespace pitt::pde {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

ForcingParams sample_forcing(Rng& rng, int terms, double domain_length) {
  ForcingParams p = ForcingParams::zero(terms, domain_length);
  for (int j = 0; j < terms; ++j) {
    p.amplitude[j] = rng.uniform(-0.25, 0.25);
    p.omega[j] = rng.uniform(-0.4, 0.4);
    p.wavenumber[j] = rng.integer(1, 3);
    p.phase[j] = rng.uniform(0.0, kTwoPi);
  }
  p.validate();
  return p;
}

std::vector<double> forcing_eval(const ForcingParams& p, double t, std::span<const double> x) {
  std::vector<double> out(x.size(), 0.0);
  for (int j = 0; j < p.terms; ++j) {
    const double k = kTwoPi * p.wavenumber[j] / p.domain_length;
    const double shift = p.omega[j] * t + p.phase[j];
    for (std::size_t i = 0; i < x.size(); ++i) out[i] += p.amplitude[j] * std::sin(shift + k * x[i]);
  }
  return out;
}

std::vector<Coefficients> paper_parameter_grid(eqtok::Family family) {
  const double values[] = {0.01, 0.05, 0.1, 0.2, 0.5, 1.0};
  std::vector<Coefficients> out;
  switch (family) {
    case eqtok::Family::heat:
      for (double b : values) out.push_back({0.0, b, 0.0});
      break;
    case eqtok::Family::burgers:
      for (double a : values)
        for (double b : values) out.push_back({a, b, 0.0});
      break;
    case eqtok::Family::kdv:
      for (double g : {2.0, 4.0, 6.0, 8.0, 10.0, 12.0}) out.push_back({0.01, 0.0, g});
      break;
    default:
      throw std::invalid_argument("paper_parameter_grid: not a 1D family");
  }
  return out;
}

Trajectory1D solve_1d(const EquationSpec& spec, const Solver1DOptions& opts) {
  if (!eqtok::is_1d(spec.family)) throw std::invalid_argument("solve_1d: family must be heat, burgers or kdv");
  spec.validate();
  if (opts.nx < 2 || opts.nt < 1 || !(opts.t_final > 0.0) || opts.internal_points < 8 ||
      opts.internal_points % 2 != 0) {
    throw std::invalid_argument("solve_1d: invalid grid options");
  }
  const ForcingParams& p = *spec.forcing;
  const double L = p.domain_length;
  const int M = opts.internal_points;
  const int half = M / 2 + 1;
  const int dealias = M / 3;

  std::vector<double> grid(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) grid[i] = L * i / M;
  std::vector<double> k(static_cast<std::size_t>(half));
  std::vector<cplx> lin(static_cast<std::size_t>(half));
  for (int m = 0; m < half; ++m) {
    k[m] = kTwoPi * m / L;
    lin[m] = cplx(-spec.beta * k[m] * k[m], spec.gamma * k[m] * k[m] * k[m]);
  }

  RealFft fft({M});
  std::vector<double> phys(static_cast<std::size_t>(M));
  std::vector<cplx> spec_buf(static_cast<std::size_t>(half));

  // Spectral coefficients normalized so that u(x) = sum over the full spectrum of c_m e^{i k_m x}.
  std::vector<cplx> uhat(static_cast<std::size_t>(half));
  {
    std::vector<double> u0(static_cast<std::size_t>(M));
    if (opts.initial) {
      for (int i = 0; i < M; ++i) u0[i] = opts.initial(grid[i]);
    } else {
      u0 = forcing_eval(p, 0.0, grid);
    }
    fft.forward(u0, uhat);
    for (auto& c : uhat) c /= static_cast<double>(M);
  }

  auto to_physical = [&](const std::vector<cplx>& c, std::vector<double>& out) {
    for (int m = 0; m < half; ++m) spec_buf[m] = c[m];
    fft.inverse(spec_buf, out);
  };

  // N(u, t) = -i k alpha FFT(u^2) + FFT(delta(t)); the forcing only touches modes l_j.
  auto nonlinear = [&](const std::vector<cplx>& c, double t, std::vector<cplx>& out) {
    std::fill(out.begin(), out.end(), cplx(0.0, 0.0));
    if (spec.alpha != 0.0) {
      to_physical(c, phys);
      for (auto& v : phys) v = v * v;
      fft.forward(phys, spec_buf);
      for (int m = 0; m < half; ++m) {
        if (m > dealias) continue;
        out[m] = cplx(0.0, -k[m] * spec.alpha) * (spec_buf[m] / static_cast<double>(M));
      }
    }
    for (int j = 0; j < p.terms; ++j) {
      const int m = p.wavenumber[j];
      if (m >= half) continue;
      // A sin(theta + k x) = A/(2i) e^{i theta} e^{i k x} + c.c.
      out[m] += p.amplitude[j] / cplx(0.0, 2.0) * std::polar(1.0, p.omega[j] * t + p.phase[j]);
    }
  };

  Trajectory1D traj;
  traj.nt = opts.nt;
  traj.nx = opts.nx;
  traj.spec = spec;
  traj.x.resize(static_cast<std::size_t>(opts.nx));
  traj.t.resize(static_cast<std::size_t>(opts.nt) + 1);
  for (int i = 0; i < opts.nx; ++i) traj.x[i] = L * i / opts.nx;
  for (int n = 0; n <= opts.nt; ++n) traj.t[n] = opts.t_final * n / opts.nt;
  traj.u.assign(static_cast<std::size_t>(opts.nt + 1) * opts.nx, 0.0);

  // Spectral interpolation table onto the save grid.
  std::vector<cplx> basis(static_cast<std::size_t>(opts.nx) * half);
  for (int i = 0; i < opts.nx; ++i)
    for (int m = 0; m < half; ++m) basis[static_cast<std::size_t>(i) * half + m] = std::polar(1.0, k[m] * traj.x[i]);
  auto save = [&](int frame) {
    for (int i = 0; i < opts.nx; ++i) {
      const cplx* b = &basis[static_cast<std::size_t>(i) * half];
      double v = uhat[0].real();
      for (int m = 1; m < half; ++m) {
        const double w = (m == M / 2) ? 1.0 : 2.0;
        v += w * (uhat[m] * b[m]).real();
      }
      if (!std::isfinite(v)) {
        throw SolverBlowUp("solve_1d: non-finite value at frame " + std::to_string(frame));
      }
      traj.u[static_cast<std::size_t>(frame) * opts.nx + i] = v;
    }
  };

  if (opts.initial) {
    save(0);
  } else {
    const auto u0 = forcing_eval(p, 0.0, traj.x);
    std::copy(u0.begin(), u0.end(), traj.u.begin());
  }

  std::vector<cplx> a(uhat.size()), b(uhat.size()), c(uhat.size()), d(uhat.size()), tmp(uhat.size());
  std::vector<cplx> e_half(uhat.size()), e_full(uhat.size());
  const double dx = L / M;
  double t = 0.0;
  for (int frame = 1; frame <= opts.nt; ++frame) {
    const double t_next = traj.t[frame];
    // Step size from the advective CFL limit of the current state.
    double dt = opts.dt_max;
    if (spec.alpha != 0.0) {
      to_physical(uhat, phys);
      double umax = 0.0;
      for (double v : phys) umax = std::max(umax, std::abs(v));
      const double speed = 2.0 * std::abs(spec.alpha) * umax;
      if (speed > 0.0) dt = std::min(dt, opts.cfl * dx / speed);
    }
    const int substeps = std::max(1, static_cast<int>(std::ceil((t_next - t) / dt - 1e-12)));
    const double h = (t_next - t) / substeps;
    for (int m = 0; m < half; ++m) {
      e_half[m] = std::exp(lin[m] * (h / 2.0));
      e_full[m] = e_half[m] * e_half[m];
    }
    for (int s = 0; s < substeps; ++s) {
      nonlinear(uhat, t, a);
      for (int m = 0; m < half; ++m) tmp[m] = e_half[m] * (uhat[m] + 0.5 * h * a[m]);
      nonlinear(tmp, t + h / 2.0, b);
      for (int m = 0; m < half; ++m) tmp[m] = e_half[m] * uhat[m] + 0.5 * h * b[m];
      nonlinear(tmp, t + h / 2.0, c);
      for (int m = 0; m < half; ++m) tmp[m] = e_full[m] * uhat[m] + e_half[m] * (h * c[m]);
      nonlinear(tmp, t + h, d);
      for (int m = 0; m < half; ++m) {
        uhat[m] = e_full[m] * uhat[m] +
                  h / 6.0 * (e_full[m] * a[m] + 2.0 * e_half[m] * (b[m] + c[m]) + d[m]);
      }
      t = (s + 1 == substeps) ? t_next : t + h;
      ++traj.internal_steps;
    }
    save(frame);
  }
  return traj;
}

}  // namespace pitt::pde
