#include "pitt/pde/grf.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pitt::pde {

namespace {
int signed_wavenumber(int i, int n) { return i <= n / 2 ? i : i - n; }
}  // namespace

double GrfSpectrum::sigma() const { return std::pow(tau, 0.5 * (2.0 * alpha - 2.0)); }

double GrfSpectrum::sqrt_eigenvalue(int kx, int ky) const {
  if (kx == 0 && ky == 0) return 0.0;
  const double lap = 4.0 * std::numbers::pi * std::numbers::pi * (kx * kx + ky * ky);
  return std::sqrt(2.0) * sigma() * std::pow(lap + tau * tau, -alpha / 2.0);
}

double GrfSpectrum::pointwise_variance(int n) const {
  double var = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double s = sqrt_eigenvalue(signed_wavenumber(i, n), signed_wavenumber(j, n));
      var += s * s;
    }
  return var;
}

GrfSample sample_grf(Rng& rng, int n, const GrfSpectrum& spectrum) {
  if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("sample_grf: n must be a power of two");
  const auto size = static_cast<std::size_t>(n) * n;
  GrfSample out;
  out.coeff_re.resize(size);
  out.coeff_im.resize(size);
  auto* buf = fftw_alloc_complex(size);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto idx = static_cast<std::size_t>(i) * n + j;
      const double s = spectrum.sqrt_eigenvalue(signed_wavenumber(i, n), signed_wavenumber(j, n));
      const double re = rng.normal(), im = rng.normal();
      out.coeff_re[idx] = s * re;
      out.coeff_im[idx] = s * im;
      buf[idx][0] = out.coeff_re[idx];
      buf[idx][1] = out.coeff_im[idx];
    }
  }
  // Unnormalized backward transform: field(x) = Re sum_k c_k e^{2 pi i k.x}.
  fftw_plan plan = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  out.field.resize(size);
  for (std::size_t idx = 0; idx < size; ++idx) out.field[idx] = buf[idx][0];
  fftw_free(buf);
  return out;
}

}  // namespace pitt::pde
