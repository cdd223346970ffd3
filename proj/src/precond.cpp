#include "homfe/precond.hpp"

#include <cmath>
#include <cstring>

namespace homfe {

namespace {

void check_reference(const Eigen::MatrixXd& c_ref, int m) {
  if (c_ref.rows() != m || c_ref.cols() != m) {
    throw ValidationError("reference tangent has wrong dimension");
  }
  if ((c_ref - c_ref.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * c_ref.cwiseAbs().maxCoeff()) {
    throw ValidationError("reference tangent must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(c_ref);
  if (llt.info() != Eigen::Success) {
    throw ValidationError("reference tangent must be positive definite");
  }
}

}  // namespace

Eigen::MatrixXd FrequencyBlockDiag::translation_kernel() const {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(block_dim_, components_);
  const double scale = 1.0 / std::sqrt(static_cast<double>(nodes_per_pixel_));
  for (int c = 0; c < components_; ++c) {
    for (int n = 0; n < nodes_per_pixel_; ++n) {
      v(c * nodes_per_pixel_ + n, c) = scale;
    }
  }
  return v;
}

bool FrequencyBlockDiag::same_blocks(const FrequencyBlockDiag& other) const {
  if (data_.size() != other.data_.size()) return false;
  return std::memcmp(data_.data(), other.data_.data(),
                     sizeof(std::complex<double>) *
                         static_cast<std::size_t>(data_.size())) == 0;
}

FrequencyBlockDiag assemble_reference(const GridLayout& layout,
                                      const Eigen::MatrixXd& c_ref,
                                      int components, bool weighted) {
  const int d = layout.dim();
  if (components != 1 && components != d) {
    throw ValidationError("assemble_reference: bad component count");
  }
  check_reference(c_ref, gradient_components(layout, components));

  FrequencyBlockDiag out;
  out.components_ = components;
  out.nodes_per_pixel_ = layout.nodes_per_pixel();
  out.block_dim_ = components * layout.nodes_per_pixel();
  out.weighted_ = weighted;
  out.fft_ = std::make_shared<FftGrid>(layout.cell().dims);
  out.num_freq_ = out.fft_->spectrum_size();
  out.data_.setZero(out.num_freq_ * out.block_dim_ * out.block_dim_);
  out.fft_->reset_counters();

  const Index np = layout.num_pixels();
  const int bdim = out.block_dim_;
  Eigen::VectorXcd spectrum(out.num_freq_);

  // One impulse per (component, node type) slice yields one block column.
  for (int col = 0; col < bdim; ++col) {
    NodalField impulse(components, layout.num_nodes());
    impulse.data[static_cast<Index>(col) * np] = 1.0;
    const NodalField response =
        apply_reference_operator(layout, c_ref, impulse, weighted);
    out.stats_.operator_applications += 1;
    for (int row = 0; row < bdim; ++row) {
      out.fft_->forward(response.data.data() + static_cast<Index>(row) * np,
                        spectrum.data());
      for (Index k = 0; k < out.num_freq_; ++k) {
        out.block(k)(row, col) = spectrum[k];
      }
    }
  }
  out.stats_.forward_transforms =
      static_cast<int>(out.fft_->forward_count());
  return out;
}

FrequencyBlockDiag invert_blocks(const FrequencyBlockDiag& blocks) {
  if (blocks.inverted()) {
    throw ValidationError("invert_blocks: blocks are already inverted");
  }
  FrequencyBlockDiag out = blocks;

  // Zero frequency: restrict to the orthogonal complement of the analytic
  // translation kernel, pseudo-inverse via (B + V V^T)^{-1} - V V^T.
  {
    const Eigen::MatrixXd v = out.translation_kernel();
    const Eigen::MatrixXcd vvt =
        (v * v.transpose()).cast<std::complex<double>>();
    Eigen::MatrixXcd b0 = out.block(0);
    out.block(0) = (b0 + vvt).inverse() - vvt;
  }

  for (Index k = 1; k < out.num_freq_; ++k) {
    const Eigen::MatrixXcd b = out.block(k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(b);
    if (eig.info() != Eigen::Success) {
      throw NumericalError("invert_blocks: eigendecomposition failed");
    }
    const auto& lam = eig.eigenvalues();
    const double lam_max = lam.cwiseAbs().maxCoeff();
    if (lam.minCoeff() <= 1e-12 * lam_max) {
      const auto f = out.fft_->frequency(k);
      throw NumericalError(
          "invert_blocks: singular non-zero-frequency block at (" +
          std::to_string(f[0]) + "," + std::to_string(f[1]) + "," +
          std::to_string(f[2]) + ")");
    }
    out.block(k) = eig.eigenvectors() *
                   lam.cwiseInverse().asDiagonal() *
                   eig.eigenvectors().adjoint();
  }
  out.inverted_ = true;
  return out;
}

NodalField apply_preconditioner(const GridLayout& layout,
                                const FrequencyBlockDiag& inv_blocks,
                                const NodalField& r) {
  if (!inv_blocks.inverted()) {
    throw ValidationError("apply_preconditioner: blocks are not inverted");
  }
  const int bdim = inv_blocks.block_dim();
  const Index np = layout.num_pixels();
  if (r.components != inv_blocks.components() ||
      r.nodes != layout.num_nodes()) {
    throw ValidationError("apply_preconditioner: field shape mismatch");
  }

  const FftGrid& fft = *inv_blocks.fft_;
  const Index nf = fft.spectrum_size();
  Eigen::MatrixXcd spectra(nf, bdim);
  for (int s = 0; s < bdim; ++s) {
    fft.forward(r.data.data() + static_cast<Index>(s) * np,
                spectra.col(s).data());
  }

  Eigen::VectorXcd rhs(bdim), sol(bdim);
  for (Index k = 0; k < nf; ++k) {
    rhs = spectra.row(k).transpose();
    sol.noalias() = inv_blocks.block(k) * rhs;
    spectra.row(k) = sol.transpose();
  }

  NodalField out(r.components, r.nodes);
  Eigen::VectorXcd column(nf);
  for (int s = 0; s < bdim; ++s) {
    column = spectra.col(s);
    fft.inverse(column.data(), out.data.data() + static_cast<Index>(s) * np);
  }
  out.data *= 1.0 / static_cast<double>(np);
  return out;
}

}  // namespace homfe
