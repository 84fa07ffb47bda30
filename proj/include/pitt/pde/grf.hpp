#pragma once

#include <vector>

#include "pitt/util/random.hpp"

namespace pitt::pde {

/// Spectral covariance of the periodic vorticity field on the unit square:
/// sqrt-eigenvalue sqrt(2) sigma (4 pi^2 |k|^2 + tau^2)^(-alpha/2), zero at k = 0.
struct GrfSpectrum {
  double alpha = 2.5;
  double tau = 7.0;
  /// sigma = tau^(alpha - 1) in two dimensions.
  double sigma() const;
  double sqrt_eigenvalue(int kx, int ky) const;
  /// Pointwise variance of the sampled field on an n x n grid.
  double pointwise_variance(int n) const;
};

struct GrfSample {
  std::vector<double> field;  // n x n, row-major
  std::vector<double> coeff_re;  // full complex spectrum, n x n (for inspection)
  std::vector<double> coeff_im;
};

GrfSample sample_grf(Rng& rng, int n = 256, const GrfSpectrum& spectrum = {});
inline std::vector<double> sample_grf_vorticity(Rng& rng, int n = 256, const GrfSpectrum& spectrum = {}) {
  return sample_grf(rng, n, spectrum).field;
}

}  // namespace pitt::pde
