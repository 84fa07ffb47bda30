#include "pitt/pde/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace pitt::pde {

RealFft::RealFft(std::vector<int> shape) : shape_(std::move(shape)) {
  if (shape_.empty() || shape_.size() > 2) throw std::invalid_argument("RealFft: 1D or 2D shapes only");
  real_size_ = 1;
  for (int n : shape_) {
    if (n < 2) throw std::invalid_argument("RealFft: extents must be >= 2");
    real_size_ *= static_cast<std::size_t>(n);
  }
  spectral_size_ = real_size_ / static_cast<std::size_t>(shape_.back()) *
                   static_cast<std::size_t>(shape_.back() / 2 + 1);
  real_buf_ = fftw_alloc_real(real_size_);
  auto* spec = fftw_alloc_complex(spectral_size_);
  spec_buf_ = spec;
  const int rank = static_cast<int>(shape_.size());
  forward_plan_ = fftw_plan_dft_r2c(rank, shape_.data(), real_buf_, spec, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r(rank, shape_.data(), spec, real_buf_, FFTW_ESTIMATE);
  if (!forward_plan_ || !inverse_plan_) throw std::runtime_error("RealFft: FFTW planning failed");
}

RealFft::~RealFft() {
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_free(real_buf_);
  fftw_free(spec_buf_);
}

void RealFft::forward(std::span<const double> in, std::span<cplx> out) {
  if (in.size() != real_size_ || out.size() != spectral_size_) throw std::invalid_argument("RealFft::forward size");
  std::copy(in.begin(), in.end(), real_buf_);
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  std::memcpy(static_cast<void*>(out.data()), spec_buf_, spectral_size_ * sizeof(cplx));
}

void RealFft::inverse(std::span<const cplx> in, std::span<double> out) {
  if (in.size() != spectral_size_ || out.size() != real_size_) throw std::invalid_argument("RealFft::inverse size");
  std::memcpy(spec_buf_, static_cast<const void*>(in.data()), spectral_size_ * sizeof(cplx));
  fftw_execute(static_cast<fftw_plan>(inverse_plan_));
  std::copy(real_buf_, real_buf_ + real_size_, out.begin());
}

}  // namespace pitt::pde
