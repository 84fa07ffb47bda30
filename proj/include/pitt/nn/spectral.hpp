#pragma once

#include <vector>

#include "pitt/nn/tensor.hpp"

namespace pitt::nn {

/// Retained Fourier modes of a 1D or 2D spectral convolution.
/// 1D keeps k in [0, m0); 2D keeps k0 in [0, m0) and [N0 - m0, N0), k1 in [0, m1).
struct SpectralModes {
  std::vector<int> modes;

  int weight_rows() const { return modes.size() == 1 ? modes[0] : 2 * modes[0] * modes[1]; }
  /// Throws std::invalid_argument when a mode count exceeds the grid's Nyquist limit.
  void check(const std::vector<int>& grid) const;
};

/// x [B, prod(grid), Cin] channels-last. Weights w_re, w_im [weight_rows, Cin, Cout].
/// y = irfft(rfft(x) * W on retained modes), normalized so a unit multiplier is the identity
/// on those modes.
Var spectral_conv(const Var& x, const Var& w_re, const Var& w_im, const std::vector<int>& grid,
                  const SpectralModes& modes);

}  // namespace pitt::nn
