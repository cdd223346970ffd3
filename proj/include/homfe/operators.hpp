#ifndef HOMFE_OPERATORS_HPP
#define HOMFE_OPERATORS_HPP

#include "homfe/fields.hpp"
#include "homfe/grid.hpp"

namespace homfe {

/**
 * Matrix-free application of the discrete symmetrized gradient and its
 * weighted transpose as short-kernel convolutions over the periodic grid.
 *
 * Nodal fields carry d components (mechanics, Mandel-valued gradients of
 * d(d+1)/2 rows with sqrt(2)-scaled shear rows) or one component (scalar
 * conduction, gradients of d rows). All kernels run in real space; cost is
 * linear in the number of pixels.
 */

/// Gradient at every quadrature point, equal to the dense product D u.
QuadField gradient_apply(const GridLayout& layout, const NodalField& u);

/// Weighted divergence D^T W s (adjoint of the gradient in the W-weighted
/// inner product). Pass weighted = false for the plain transpose D^T s.
NodalField divergence_apply(const GridLayout& layout, const QuadField& s,
                            bool weighted = true);

/// Per-quadrature-point tangent multiply, t(Q) = C(Q) s(Q).
QuadField tangent_multiply(const TangentField& tangent, const QuadField& s);

/// Fused operator K u = D^T W C D u in one pass over quadrature points.
NodalField apply_tangent_operator(const GridLayout& layout,
                                  const TangentField& tangent,
                                  const NodalField& u, bool weighted = true);

/// K_ref u for a spatially uniform tangent, without materializing the field.
NodalField apply_reference_operator(const GridLayout& layout,
                                    const Eigen::MatrixXd& c_ref,
                                    const NodalField& u, bool weighted = true);

/// Number of gradient rows for a given node-component count on this layout.
int gradient_components(const GridLayout& layout, int node_components);

}  // namespace homfe

#endif
