#include "homfe/fft.hpp"

#include <fftw3.h>

#include <cstring>

namespace homfe {

struct FftGrid::Impl {
  double* real_buf = nullptr;
  fftw_complex* complex_buf = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;

  ~Impl() {
    if (forward) fftw_destroy_plan(forward);
    if (inverse) fftw_destroy_plan(inverse);
    if (real_buf) fftw_free(real_buf);
    if (complex_buf) fftw_free(complex_buf);
  }
};

FftGrid::FftGrid(const std::vector<Index>& dims)
    : impl_(std::make_unique<Impl>()), dims_(dims) {
  const int rank = static_cast<int>(dims.size());
  if (rank != 2 && rank != 3) {
    throw ValidationError("fft: rank must be 2 or 3");
  }
  std::vector<int> n(dims.begin(), dims.end());
  spec_dims_ = dims_;
  spec_dims_.back() = dims_.back() / 2 + 1;
  real_size_ = 1;
  spectrum_size_ = 1;
  for (int a = 0; a < rank; ++a) {
    real_size_ *= dims_[static_cast<std::size_t>(a)];
    spectrum_size_ *= spec_dims_[static_cast<std::size_t>(a)];
  }

  impl_->real_buf = fftw_alloc_real(static_cast<std::size_t>(real_size_));
  impl_->complex_buf =
      fftw_alloc_complex(static_cast<std::size_t>(spectrum_size_));
  impl_->forward = fftw_plan_dft_r2c(rank, n.data(), impl_->real_buf,
                                     impl_->complex_buf, FFTW_ESTIMATE);
  impl_->inverse = fftw_plan_dft_c2r(rank, n.data(), impl_->complex_buf,
                                     impl_->real_buf, FFTW_ESTIMATE);
  if (!impl_->forward || !impl_->inverse) {
    throw NumericalError("fft: plan creation failed");
  }
}

FftGrid::~FftGrid() = default;

void FftGrid::forward(const double* in, std::complex<double>* out) const {
  std::memcpy(impl_->real_buf, in,
              sizeof(double) * static_cast<std::size_t>(real_size_));
  fftw_execute(impl_->forward);
  std::memcpy(static_cast<void*>(out), impl_->complex_buf,
              sizeof(fftw_complex) * static_cast<std::size_t>(spectrum_size_));
  ++n_forward_;
}

void FftGrid::inverse(const std::complex<double>* in, double* out) const {
  std::memcpy(impl_->complex_buf, in,
              sizeof(fftw_complex) * static_cast<std::size_t>(spectrum_size_));
  fftw_execute(impl_->inverse);
  std::memcpy(out, impl_->real_buf,
              sizeof(double) * static_cast<std::size_t>(real_size_));
  ++n_inverse_;
}

std::array<Index, 3> FftGrid::frequency(Index spec_index) const {
  std::array<Index, 3> k{0, 0, 0};
  for (int a = static_cast<int>(spec_dims_.size()) - 1; a >= 0; --a) {
    const Index n = spec_dims_[static_cast<std::size_t>(a)];
    k[static_cast<std::size_t>(a)] = spec_index % n;
    spec_index /= n;
  }
  return k;
}

}  // namespace homfe
