#ifndef HOMFE_PROJECTION_HPP
#define HOMFE_PROJECTION_HPP

#include <Eigen/Dense>
#include <vector>

#include "homfe/precond.hpp"
#include "homfe/solver.hpp"

namespace homfe {

/**
 * Strain-based counterpart of the displacement scheme, built from the
 * discretized periodic Green's projection
 *
 *   Gamma = D (D^T C_ref D)^+ D^T
 *
 * for stencils with equal quadrature weights (the weight matrix drops out).
 * For C_ref = I the map is the W-orthogonal projection onto compatible
 * fields {D u}. Exists for the equivalence study with the displacement
 * scheme; the displacement solver is the production path.
 */

/// Blocks of D^T C_ref D (no weight fusion), pseudo-inverted, as Gamma needs.
FrequencyBlockDiag assemble_projection_blocks(const GridLayout& layout,
                                              const Eigen::MatrixXd& c_ref,
                                              int components);

/// Gamma s. Requires equal-weight stencils and unweighted inverted blocks.
QuadField gamma_apply(const GridLayout& layout,
                      const FrequencyBlockDiag& inv_blocks,
                      const QuadField& s);

struct SbOutcome {
  QuadField strain;  ///< fluctuating strain, compatible by construction
  InternalState internal;
  QuadField stress;
  Eigen::VectorXd average_stress;
  SolveReport report;
  bool converged = false;
};

/**
 * Newton iteration on the strain unknown with Gamma-projected conjugate
 * gradients, stopping criteria mirroring the displacement scheme so that
 * the two produce matching iterate and count sequences in exact
 * arithmetic.
 */
SbOutcome sb_newton_solve(const GridLayout& layout, const MaterialMap& map,
                          const InternalState& g0, const Eigen::VectorXd& e,
                          const SolveConfig& cfg, const Eigen::MatrixXd& c_ref,
                          const QuadField* warm_start = nullptr);

struct DbSbComparison {
  std::vector<SolveReport> db_reports;  ///< one per load step
  std::vector<SolveReport> sb_reports;
  std::vector<Eigen::VectorXd> db_average_stress;
  std::vector<Eigen::VectorXd> sb_average_stress;
  std::vector<double> strain_discrepancy;  ///< relative inf-norm per step
  bool converged = false;

  bool newton_counts_equal() const;
  /// Per-step CG counts equal within the given slack.
  bool cg_counts_match(int slack = 1) const;
};

/// Run both schemes on the same load program at matched tolerances and the
/// same reference tangent; report counts, residual norms and the solution
/// discrepancy.
DbSbComparison compare_db_sb(const GridLayout& layout, const MaterialMap& map,
                             const std::vector<Eigen::VectorXd>& loads,
                             const SolveConfig& cfg,
                             const Eigen::MatrixXd& c_ref);

}  // namespace homfe

#endif
