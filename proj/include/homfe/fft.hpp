#ifndef HOMFE_FFT_HPP
#define HOMFE_FFT_HPP

#include <array>
#include <complex>
#include <memory>
#include <vector>

#include "homfe/common.hpp"

namespace homfe {

/**
 * Real-to-complex FFT on the pixel grid (FFTW backend). Transforms are
 * unnormalized; the half spectrum with Hermitian-redundant frequencies
 * removed is stored, with the last axis reduced to N/2 + 1 entries.
 *
 * Plans are created once per grid with deterministic heuristics. An
 * instance owns its scratch buffers and is not reentrant; concurrent use
 * requires one instance per thread.
 */
class FftGrid {
 public:
  explicit FftGrid(const std::vector<Index>& dims);
  ~FftGrid();

  FftGrid(const FftGrid&) = delete;
  FftGrid& operator=(const FftGrid&) = delete;

  Index real_size() const { return real_size_; }
  Index spectrum_size() const { return spectrum_size_; }
  const std::vector<Index>& dims() const { return dims_; }

  /// Forward transform of one real scalar field into the half spectrum.
  void forward(const double* in, std::complex<double>* out) const;

  /// Inverse transform of a half spectrum (unnormalized: scaled by the
  /// pixel count relative to the true inverse). The input is copied.
  void inverse(const std::complex<double>* in, double* out) const;

  /// Frequency multi-index of a stored spectrum entry.
  std::array<Index, 3> frequency(Index spec_index) const;

  long forward_count() const { return n_forward_; }
  long inverse_count() const { return n_inverse_; }
  void reset_counters() const { n_forward_ = n_inverse_ = 0; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::vector<Index> dims_;
  std::vector<Index> spec_dims_;
  Index real_size_ = 0;
  Index spectrum_size_ = 0;
  mutable long n_forward_ = 0;
  mutable long n_inverse_ = 0;
};

}  // namespace homfe

#endif
