#ifndef HOMFE_PRECOND_HPP
#define HOMFE_PRECOND_HPP

#include <Eigen/Dense>
#include <memory>

#include "homfe/fft.hpp"
#include "homfe/fields.hpp"
#include "homfe/grid.hpp"
#include "homfe/operators.hpp"

namespace homfe {

struct AssemblyStats {
  int operator_applications = 0;
  int forward_transforms = 0;
};

/**
 * Fourier-diagonalized reference operator K_ref = D^T W C_ref D (or its
 * pseudo-inverse after invert_blocks): one Hermitian (c Nn) x (c Nn) complex
 * block per stored frequency. The block at the zero frequency is singular
 * with a kernel spanned by the c uniform translation modes (identical
 * across node types) and is Moore-Penrose pseudo-inverted.
 *
 * Immutable after inversion; apply_preconditioner is pure.
 */
class FrequencyBlockDiag {
 public:
  int block_dim() const { return block_dim_; }
  Index num_frequencies() const { return num_freq_; }
  int components() const { return components_; }
  int nodes_per_pixel() const { return nodes_per_pixel_; }
  bool weighted() const { return weighted_; }
  bool inverted() const { return inverted_; }
  Index zero_frequency() const { return 0; }

  Eigen::Map<const Eigen::MatrixXcd> block(Index k) const {
    return {data_.data() + k * block_dim_ * block_dim_, block_dim_,
            block_dim_};
  }
  Eigen::Map<Eigen::MatrixXcd> block(Index k) {
    return {data_.data() + k * block_dim_ * block_dim_, block_dim_,
            block_dim_};
  }

  enum class BlockFlag : std::uint8_t { Invertible, PseudoInverted };
  BlockFlag flag(Index k) const {
    return k == 0 ? BlockFlag::PseudoInverted : BlockFlag::Invertible;
  }

  const AssemblyStats& assembly_stats() const { return stats_; }
  const FftGrid& fft() const { return *fft_; }

  /// Orthonormal basis of the zero-frequency kernel (the c translations).
  Eigen::MatrixXd translation_kernel() const;

  /// Bitwise comparison of the stored blocks (reassembly idempotence).
  bool same_blocks(const FrequencyBlockDiag& other) const;

 private:
  friend FrequencyBlockDiag assemble_reference(const GridLayout&,
                                               const Eigen::MatrixXd&, int,
                                               bool);
  friend FrequencyBlockDiag invert_blocks(const FrequencyBlockDiag&);
  friend NodalField apply_preconditioner(const GridLayout&,
                                         const FrequencyBlockDiag&,
                                         const NodalField&);

  int block_dim_ = 0;
  Index num_freq_ = 0;
  int components_ = 0;
  int nodes_per_pixel_ = 0;
  bool weighted_ = true;
  bool inverted_ = false;
  Eigen::VectorXcd data_;
  AssemblyStats stats_;
  std::shared_ptr<FftGrid> fft_;
};

/**
 * Assemble the Fourier blocks of the reference operator by impulse probing:
 * apply K_ref to one unit impulse per (component, node type) slice and take
 * the FFT of every slice of the response. Costs exactly c Nn operator
 * applications and (c Nn)^2 forward transforms.
 *
 * c_ref must be symmetric positive definite. `weighted` controls the
 * quadrature-weight fusion (dropped for the compatibility projection).
 */
FrequencyBlockDiag assemble_reference(const GridLayout& layout,
                                      const Eigen::MatrixXd& c_ref,
                                      int components, bool weighted = true);

/**
 * Invert every frequency block: plain Hermitian inverses away from the zero
 * frequency, Moore-Penrose pseudo-inverse (with the analytic translation
 * kernel) at the zero frequency. A numerically singular non-zero-frequency
 * block raises NumericalError.
 */
FrequencyBlockDiag invert_blocks(const FrequencyBlockDiag& blocks);

/// M^{-1} r: forward FFT per slice, per-frequency block multiply, inverse
/// FFT. Linear in r; output is exactly real by the half-spectrum storage.
NodalField apply_preconditioner(const GridLayout& layout,
                                const FrequencyBlockDiag& inv_blocks,
                                const NodalField& r);

}  // namespace homfe

#endif
