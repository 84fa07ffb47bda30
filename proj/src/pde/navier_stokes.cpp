#include "pitt/pde/navier_stokes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pitt/pde/fft.hpp"

namespace pitt::pde {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct SpectralGrid {
  int n;
  int half;
  std::vector<double> kx, ky;  // derivative wavenumbers per half-spectrum entry, Nyquist zeroed
  std::vector<double> lap;     // 4 pi^2 |k|^2, with the zero mode set to 1
  std::vector<double> mask;    // 2/3 dealiasing

  explicit SpectralGrid(int n_) : n(n_), half(n_ / 2 + 1) {
    const auto size = static_cast<std::size_t>(n) * half;
    kx.resize(size);
    ky.resize(size);
    lap.resize(size);
    mask.resize(size);
    const double kmax = n / 2.0;
    for (int i = 0; i < n; ++i) {
      const double kyi = i <= n / 2 ? i : i - n;  // rows vary along y
      for (int j = 0; j < half; ++j) {
        const auto idx = static_cast<std::size_t>(i) * half + j;
        kx[idx] = (j == n / 2) ? 0.0 : j;
        ky[idx] = (i == n / 2) ? 0.0 : kyi;
        lap[idx] = 4.0 * std::numbers::pi * std::numbers::pi * (kyi * kyi + j * j);
        mask[idx] = (std::abs(kyi) <= 2.0 / 3.0 * kmax && j <= 2.0 / 3.0 * kmax) ? 1.0 : 0.0;
      }
    }
    lap[0] = 1.0;
  }
  std::size_t size() const { return kx.size(); }
};

}  // namespace

std::vector<double> ns_forcing(int n, double amp) {
  std::vector<double> f(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x1 = static_cast<double>(j) / n, x2 = static_cast<double>(i) / n;
      const double arg = kTwoPi * (x1 + x2);
      f[static_cast<std::size_t>(i) * n + j] = amp * (std::sin(arg) + std::cos(arg));
    }
  return f;
}

Velocity velocity_from_vorticity(const std::vector<double>& w, int n) {
  SpectralGrid g(n);
  RealFft fft({n, n});
  std::vector<cplx> wh(g.size()), uh(g.size()), vh(g.size());
  fft.forward(w, wh);
  const double scale = 1.0 / (static_cast<double>(n) * n);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const cplx psi = (k == 0) ? cplx(0.0) : wh[k] / g.lap[k];
    uh[k] = cplx(0.0, kTwoPi * g.ky[k]) * psi * scale;
    vh[k] = -cplx(0.0, kTwoPi * g.kx[k]) * psi * scale;
  }
  Velocity vel;
  vel.u.resize(w.size());
  vel.v.resize(w.size());
  fft.inverse(uh, vel.u);
  fft.inverse(vh, vel.v);
  return vel;
}

std::vector<double> spectral_divergence(const Velocity& vel, int n) {
  SpectralGrid g(n);
  RealFft fft({n, n});
  std::vector<cplx> uh(g.size()), vh(g.size()), dh(g.size());
  fft.forward(vel.u, uh);
  fft.forward(vel.v, vh);
  const double scale = 1.0 / (static_cast<double>(n) * n);
  for (std::size_t k = 0; k < g.size(); ++k) {
    dh[k] = (cplx(0.0, kTwoPi * g.kx[k]) * uh[k] + cplx(0.0, kTwoPi * g.ky[k]) * vh[k]) * scale;
  }
  std::vector<double> div(vel.u.size());
  fft.inverse(dh, div);
  return div;
}

NSTrajectory solve_ns(double nu, double amp, const std::vector<double>& w0, const NSOptions& opts) {
  const int n = opts.n;
  if (!(nu > 0.0)) throw std::invalid_argument("solve_ns: viscosity must be positive");
  if (n < 8 || (n & (n - 1)) != 0) throw std::invalid_argument("solve_ns: n must be a power of two");
  if (opts.save_n < 1 || n % opts.save_n != 0) throw std::invalid_argument("solve_ns: save_n must divide n");
  if (w0.size() != static_cast<std::size_t>(n) * n) throw std::invalid_argument("solve_ns: w0 has the wrong size");
  if (opts.frames < 1 || !(opts.t_final > 0.0)) throw std::invalid_argument("solve_ns: bad time grid");

  SpectralGrid g(n);
  RealFft fft({n, n});
  const std::size_t ns = g.size();
  const auto np = static_cast<std::size_t>(n) * n;
  const double scale = 1.0 / static_cast<double>(np);
  const double dx = 1.0 / n;

  std::vector<cplx> wh(ns), fh(ns), nl(ns), nl_prev(ns), tmp(ns);
  fft.forward(w0, wh);
  {
    const auto f = ns_forcing(n, amp);
    fft.forward(f, fh);
  }
  std::vector<double> u(np), v(np), wx(np), wy(np), prod(np);

  NSTrajectory out;
  out.save_n = opts.save_n;
  out.frames = opts.frames;
  out.nu = nu;
  out.amp = amp;
  out.w0 = w0;
  const int stride = n / opts.save_n;
  const auto frame_size = static_cast<std::size_t>(opts.save_n) * opts.save_n;
  out.w.resize(frame_size * static_cast<std::size_t>(opts.frames + 1));
  out.t.resize(static_cast<std::size_t>(opts.frames) + 1);

  std::vector<double> phys(np);
  auto record = [&](int frame) {
    if (frame == 0) {
      phys = w0;
    } else {
      fft.inverse(wh, phys);
      for (auto& x : phys) x *= scale;
    }
    for (int i = 0; i < opts.save_n; ++i)
      for (int j = 0; j < opts.save_n; ++j) {
        const double val = phys[static_cast<std::size_t>(i * stride) * n + j * stride];
        if (!std::isfinite(val)) {
          throw NSBlowUp("solve_ns: non-finite vorticity at step " + std::to_string(out.steps) +
                         " (max CFL " + std::to_string(out.max_cfl) + ")");
        }
        out.w[static_cast<std::size_t>(frame) * frame_size + static_cast<std::size_t>(i) * opts.save_n + j] = val;
      }
    out.t[frame] = opts.t_final * frame / opts.frames;
  };

  // Explicit part -u.grad(w) + f in spectral space; returns max(|u| + |v|).
  auto explicit_term = [&](const std::vector<cplx>& w_hat, std::vector<cplx>& result) {
    for (std::size_t k = 0; k < ns; ++k) {
      const cplx psi = (k == 0) ? cplx(0.0) : w_hat[k] / g.lap[k];
      tmp[k] = cplx(0.0, kTwoPi * g.ky[k]) * psi * scale;
    }
    fft.inverse(tmp, u);
    for (std::size_t k = 0; k < ns; ++k) {
      const cplx psi = (k == 0) ? cplx(0.0) : w_hat[k] / g.lap[k];
      tmp[k] = -cplx(0.0, kTwoPi * g.kx[k]) * psi * scale;
    }
    fft.inverse(tmp, v);
    for (std::size_t k = 0; k < ns; ++k) tmp[k] = cplx(0.0, kTwoPi * g.kx[k]) * w_hat[k] * scale;
    fft.inverse(tmp, wx);
    for (std::size_t k = 0; k < ns; ++k) tmp[k] = cplx(0.0, kTwoPi * g.ky[k]) * w_hat[k] * scale;
    fft.inverse(tmp, wy);
    double speed = 0.0;
    for (std::size_t p = 0; p < np; ++p) {
      prod[p] = u[p] * wx[p] + v[p] * wy[p];
      speed = std::max(speed, std::abs(u[p]) + std::abs(v[p]));
    }
    fft.forward(prod, result);
    for (std::size_t k = 0; k < ns; ++k) result[k] = -result[k] * g.mask[k] + fh[k];
    return speed;
  };

  // Low-storage IMEX RK3 (Spalart, Moser & Rogers) coefficients.
  static constexpr double kGamma[3] = {8.0 / 15.0, 5.0 / 12.0, 3.0 / 4.0};
  static constexpr double kZeta[3] = {0.0, -17.0 / 60.0, -5.0 / 12.0};
  static constexpr double kAlpha[3] = {4.0 / 15.0, 1.0 / 15.0, 1.0 / 6.0};
  static constexpr double kBeta[3] = {4.0 / 15.0, 1.0 / 15.0, 1.0 / 6.0};

  record(0);
  double t = 0.0;
  for (int frame = 1; frame <= opts.frames; ++frame) {
    const double t_next = opts.t_final * frame / opts.frames;
    while (t < t_next - 1e-12) {
      double speed = explicit_term(wh, nl);
      double dt = opts.dt_max;
      if (speed > 0.0) dt = std::min(dt, opts.cfl * dx / speed);
      if (t + dt > t_next) dt = t_next - t;
      out.max_cfl = std::max(out.max_cfl, speed * dt / dx);
      for (int stage = 0; stage < 3; ++stage) {
        if (stage > 0) explicit_term(wh, nl);
        for (std::size_t k = 0; k < ns; ++k) {
          const double visc = (k == 0) ? 0.0 : nu * g.lap[k] * dt;
          wh[k] = ((1.0 - kAlpha[stage] * visc) * wh[k] + dt * (kGamma[stage] * nl[k] + kZeta[stage] * nl_prev[k])) /
                  (1.0 + kBeta[stage] * visc);
        }
        std::swap(nl, nl_prev);
      }
      t += dt;
      ++out.steps;
      if (!std::isfinite(std::abs(wh[1]))) {
        throw NSBlowUp("solve_ns: non-finite vorticity at step " + std::to_string(out.steps) + " (CFL " +
                       std::to_string(speed * dt / dx) + ")");
      }
    }
    t = t_next;
    record(frame);
  }
  return out;
}

std::vector<double> paper_viscosities() {
  std::vector<double> out;
  for (int decade = -9; decade <= -6; ++decade)
    for (int m = 1; m <= 9; ++m) out.push_back(m * std::pow(10.0, decade));
  out.push_back(1e-5);
  return out;
}

std::vector<double> paper_amplitudes() {
  std::vector<double> out;
  for (int m = 1; m <= 10; ++m) out.push_back(0.001 * m);
  return out;
}

}  // namespace pitt::pde
