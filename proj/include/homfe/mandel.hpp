#ifndef HOMFE_MANDEL_HPP
#define HOMFE_MANDEL_HPP

#include <Eigen/Dense>
#include <vector>

#include "homfe/common.hpp"

namespace homfe {

/**
 * Mandel-notation algebra for symmetric second- and fourth-order tensors.
 *
 * A symmetric d x d tensor maps to a vector of length d(d+1)/2 whose
 * off-diagonal entries carry a factor sqrt(2), so that the Euclidean norm
 * of the vector equals the Frobenius norm of the tensor and the vector dot
 * product equals the tensor double contraction. Component order:
 *
 *   d = 2:  (11, 22, 12)
 *   d = 3:  (11, 22, 33, 23, 13, 12)
 *
 * Fourth-order tensors with minor symmetries map to square matrices of the
 * same size; major symmetry of the tensor corresponds to matrix symmetry.
 */

/// Number of Mandel components, d(d+1)/2.
int mandel_dim(int d);

/// Index pairs (i, j) of the Mandel components for dimension d.
const std::vector<std::pair<int, int>>& mandel_pairs(int d);

/// Symmetric tensor -> Mandel vector. The input is symmetrized first.
Eigen::VectorXd to_mandel(const Eigen::MatrixXd& tensor);

/// Mandel vector -> symmetric tensor.
Eigen::MatrixXd from_mandel(const Eigen::VectorXd& v);

/// Fourth-order tensor (flat array, index ((i*d + j)*d + k)*d + l) ->
/// Mandel matrix.
Eigen::MatrixXd to_mandel_stiffness(const std::vector<double>& c, int d);

/// The symmetrized identity I_s, an identity matrix in Mandel notation.
Eigen::MatrixXd mandel_identity(int d);

/// Mandel image of the second-order identity: (1, .., 1, 0, .., 0).
Eigen::VectorXd mandel_trace_vector(int d);

/// Volumetric projector P_vol = m m^T / d with m the trace vector.
Eigen::MatrixXd volumetric_projector(int d);

/// Deviatoric projector P_dev = I_s - P_vol.
Eigen::MatrixXd deviatoric_projector(int d);

/**
 * Isotropic stiffness 3K P_vol + 2G P_dev in Mandel notation.
 *
 * For d = 2 the convention is plane strain: the 3d matrix built from the
 * same moduli is restricted to the in-plane components (11, 22, 12).
 * Throws ValidationError for non-positive moduli.
 */
Eigen::MatrixXd isotropic_stiffness(double bulk_modulus, double shear_modulus,
                                    int d);

}  // namespace homfe

#endif
