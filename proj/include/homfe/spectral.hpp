#ifndef HOMFE_SPECTRAL_HPP
#define HOMFE_SPECTRAL_HPP

#include <Eigen/Dense>
#include <string>

#include "homfe/fields.hpp"
#include "homfe/grid.hpp"

namespace homfe {

/// Explicitly assembled operator, for oracle use on small grids only.
struct DenseOperator {
  Eigen::MatrixXd matrix;
  std::string provenance;  ///< "K" or "K_ref"
};

/**
 * Assemble the dense matrix of the matrix-free operator column by column
 * (one operator application per unit vector). Guarded to small problems:
 * components * num_nodes must not exceed 4096.
 */
DenseOperator dense_assemble(const GridLayout& layout,
                             const TangentField& tangent, int components,
                             bool weighted = true,
                             const std::string& provenance = "K");

/**
 * Element-by-element two-sided eigenvalue bounds for the preconditioned
 * operator. Each node receives the extreme generalized eigenvalues of
 * (C_ref^{-1} C(x_q)) over the quadrature points in its basis-function
 * support; every per-node value is replicated once per component and both
 * sequences are sorted non-decreasingly.
 */
struct BoundSequences {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

BoundSequences eigenvalue_bounds(const GridLayout& layout,
                                 const TangentField& tangent,
                                 const Eigen::MatrixXd& c_ref, int components);

/// Upper bound max(upper)/min(lower) on the condition number of the
/// preconditioned operator.
double condition_estimate(const BoundSequences& bounds);

}  // namespace homfe

#endif
