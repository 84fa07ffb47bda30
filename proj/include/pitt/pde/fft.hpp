#pragma once

#include <complex>
#include <span>
#include <vector>

namespace pitt::pde {

using cplx = std::complex<double>;

/// Unnormalized real-to-complex transforms on a fixed shape (1D or 2D, row-major).
/// Forward yields the half spectrum (last axis n/2 + 1); inverse is its unscaled adjoint pair.
class RealFft {
 public:
  explicit RealFft(std::vector<int> shape);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t real_size() const { return real_size_; }
  std::size_t spectral_size() const { return spectral_size_; }
  const std::vector<int>& shape() const { return shape_; }

  void forward(std::span<const double> in, std::span<cplx> out);
  /// Unnormalized complex-to-real transform; divide by real_size() for the inverse.
  void inverse(std::span<const cplx> in, std::span<double> out);

 private:
  std::vector<int> shape_;
  std::size_t real_size_ = 0;
  std::size_t spectral_size_ = 0;
  double* real_buf_ = nullptr;
  void* spec_buf_ = nullptr;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace pitt::pde
