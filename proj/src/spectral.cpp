#include "homfe/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "homfe/mandel.hpp"
#include "homfe/operators.hpp"

namespace homfe {

DenseOperator dense_assemble(const GridLayout& layout,
                             const TangentField& tangent, int components,
                             bool weighted, const std::string& provenance) {
  const Index n = components * layout.num_nodes();
  if (n > 4096) {
    throw ValidationError("dense_assemble: problem too large (" +
                          std::to_string(n) + " > 4096 unknowns)");
  }
  DenseOperator out;
  out.provenance = provenance;
  out.matrix.resize(n, n);
  NodalField unit(components, layout.num_nodes());
  for (Index j = 0; j < n; ++j) {
    unit.data.setZero();
    unit.data[j] = 1.0;
    out.matrix.col(j) =
        apply_tangent_operator(layout, tangent, unit, weighted).data;
  }
  return out;
}

BoundSequences eigenvalue_bounds(const GridLayout& layout,
                                 const TangentField& tangent,
                                 const Eigen::MatrixXd& c_ref,
                                 int components) {
  const int m = tangent.m;
  if (c_ref.rows() != m || c_ref.cols() != m) {
    throw ValidationError("eigenvalue_bounds: reference has wrong size");
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(c_ref);
  if (llt.info() != Eigen::Success) {
    throw ValidationError(
        "eigenvalue_bounds: reference must be positive definite");
  }
  if (tangent.quads != layout.num_quads()) {
    throw ValidationError("eigenvalue_bounds: tangent does not match layout");
  }

  // Pencil reduction: the generalized eigenvalues of C_ref^{-1} C are those
  // of L^{-1} C L^{-T} with C_ref = L L^T.
  const Eigen::MatrixXd l_inv =
      llt.matrixL().solve(Eigen::MatrixXd::Identity(m, m));

  const Index np = layout.num_pixels();
  const int nq = layout.quads_per_pixel();
  Eigen::VectorXd q_min(layout.num_quads()), q_max(layout.num_quads());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  for (Index q = 0; q < layout.num_quads(); ++q) {
    // Element-wise-constant shortcut: one pencil per pixel.
    if (tangent.pixel_constant && q % nq != 0) {
      q_min[q] = q_min[q - q % nq];
      q_max[q] = q_max[q - q % nq];
      continue;
    }
    const Eigen::MatrixXd reduced =
        l_inv * tangent.block(q) * l_inv.transpose();
    eig.compute(reduced, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
      throw NumericalError("eigenvalue_bounds: eigensolver failed");
    }
    q_min[q] = eig.eigenvalues().minCoeff();
    q_max[q] = eig.eigenvalues().maxCoeff();
    if (!(q_min[q] > 0.0)) {
      throw ValidationError(
          "eigenvalue_bounds: tangent must be positive definite per point");
    }
  }

  // Scatter the quadrature extremes to every node whose basis function
  // supports the point: node (wrap(p + offset), type) sees point (p, lq).
  const Index nn = layout.num_nodes();
  Eigen::VectorXd node_min =
      Eigen::VectorXd::Constant(nn, std::numeric_limits<double>::infinity());
  Eigen::VectorXd node_max = Eigen::VectorXd::Constant(nn, 0.0);
  Index coords[3];
  for (Index p = 0; p < np; ++p) {
    layout.pixel_coords(p, coords);
    for (int lq = 0; lq < nq; ++lq) {
      const Index q = layout.quad_index(p, lq);
      for (const auto& e :
           layout.stencil().quads[static_cast<std::size_t>(lq)].entries) {
        const auto& off =
            layout.stencil()
                .pixel_offsets[static_cast<std::size_t>(e.offset_index)];
        const Index nbr = layout.wrap_index(
            std::span<const Index>(coords,
                                   static_cast<std::size_t>(layout.dim())),
            std::span<const Index>(off.data(),
                                   static_cast<std::size_t>(layout.dim())));
        const Index node = layout.node_index(nbr, e.node);
        node_min[node] = std::min(node_min[node], q_min[q]);
        node_max[node] = std::max(node_max[node], q_max[q]);
      }
    }
  }

  BoundSequences out;
  out.lower.resize(components * nn);
  out.upper.resize(components * nn);
  for (Index i = 0; i < nn; ++i) {
    for (int k = 0; k < components; ++k) {
      out.lower[i * components + k] = node_min[i];
      out.upper[i * components + k] = node_max[i];
    }
  }
  std::sort(out.lower.begin(), out.lower.end());
  std::sort(out.upper.begin(), out.upper.end());
  return out;
}

double condition_estimate(const BoundSequences& bounds) {
  if (bounds.lower.size() == 0 || !(bounds.lower.minCoeff() > 0.0)) {
    throw ValidationError("condition_estimate: bounds must be positive");
  }
  return bounds.upper.maxCoeff() / bounds.lower.minCoeff();
}

}  // namespace homfe
