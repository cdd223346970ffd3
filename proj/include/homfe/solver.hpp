#ifndef HOMFE_SOLVER_HPP
#define HOMFE_SOLVER_HPP

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "homfe/fields.hpp"
#include "homfe/grid.hpp"
#include "homfe/material.hpp"
#include "homfe/precond.hpp"

namespace homfe {

struct SolveConfig {
  double eta_newton = 1e-5;  ///< relative Newton tolerance, in (0,1)
  double eta_cg = 1e-5;      ///< relative CG tolerance, in (0,1)
  int max_newton = 25;
  int max_cg = 20000;
  double reassembly_threshold = 0.1;  ///< relative tangent drift triggering
                                      ///< preconditioner reassembly

  /// Newton termination: the strain-increment criterion
  /// |D du|_W <= eta |D u|_W, or the plain displacement form
  /// |du| <= eta |u| of the solver pseudo-code.
  enum class NewtonCriterion { StrainIncrement, DisplacementIncrement };
  NewtonCriterion criterion = NewtonCriterion::StrainIncrement;

  void validate() const;
};

enum class TerminationCause { Converged, CgStall, NewtonCap };

std::string to_string(TerminationCause cause);

struct NewtonStep {
  int cg_iterations = 0;
  double residual_initial = 0.0;  ///< |b|_{M^-1} entering the step
  double residual_final = 0.0;    ///< |b - K du|_{M^-1} after PCG
  double increment_rel = 0.0;     ///< Newton criterion value after update
  bool precond_reassembled = false;
};

struct SolveReport {
  std::vector<NewtonStep> steps;
  TerminationCause cause = TerminationCause::Converged;
  double seconds_constitutive = 0.0;
  double seconds_cg = 0.0;
  double seconds_assembly = 0.0;
  double seconds_total = 0.0;

  int newton_steps() const { return static_cast<int>(steps.size()); }
  int total_cg() const;
};

using LinearOperator = std::function<NodalField(const NodalField&)>;
using IterateObserver = std::function<void(const NodalField&)>;

struct PcgOutcome {
  NodalField x;
  int iterations = 0;
  std::vector<double> history;  ///< |r_k|_{M^-1}, starting from r_0
  bool converged = false;
};

/**
 * Preconditioned conjugate gradients with M^{-1}-norm stopping:
 * terminates when |r_k|_{M^-1} <= eta |r_0|_{M^-1}. apply_a must be
 * symmetric positive semi-definite on the zero-mean subspace and
 * apply_minv symmetric PSD; a non-positive curvature <p, A p> aborts with
 * NumericalError. Returns the best iterate with converged = false when the
 * iteration cap is hit.
 */
PcgOutcome pcg_solve(const LinearOperator& apply_a,
                     const LinearOperator& apply_minv, const NodalField& b,
                     double eta, int it_max,
                     const IterateObserver& observer = {});

/// Rule for choosing the uniform reference tangent of the preconditioner.
struct ReferencePolicy {
  enum class Kind { IdentityScaled, VolumeMean, Explicit };
  Kind kind = Kind::VolumeMean;
  double scale = 1.0;      ///< for IdentityScaled
  Eigen::MatrixXd matrix;  ///< for Explicit

  Eigen::MatrixXd resolve(const GridLayout& layout,
                          const TangentField& tangent) const;

  static ReferencePolicy identity_scaled(double scale = 1.0) {
    return {Kind::IdentityScaled, scale, {}};
  }
  static ReferencePolicy volume_mean() { return {Kind::VolumeMean, 1.0, {}}; }
  static ReferencePolicy explicit_matrix(Eigen::MatrixXd m) {
    return {Kind::Explicit, 1.0, std::move(m)};
  }
};

/**
 * Owns the assembled preconditioner and its reassembly policy: blocks are
 * rebuilt when the volume-averaged tangent drifts from the state at the
 * last assembly by more than the configured relative Frobenius threshold
 * (and on first use, or when the resolved reference matrix changes).
 */
class PrecondManager {
 public:
  PrecondManager(ReferencePolicy policy, double threshold, int components,
                 bool weighted = true)
      : policy_(std::move(policy)), threshold_(threshold),
        components_(components), weighted_(weighted) {}

  const FrequencyBlockDiag& ensure(const GridLayout& layout,
                                   const TangentField& tangent);

  bool last_call_reassembled() const { return last_reassembled_; }
  const Eigen::MatrixXd& reference_used() const { return c_ref_used_; }
  int assemblies() const { return assemblies_; }

 private:
  ReferencePolicy policy_;
  double threshold_;
  int components_;
  bool weighted_;
  std::optional<FrequencyBlockDiag> inverted_;
  Eigen::MatrixXd c_ref_used_;
  Eigen::MatrixXd mean_at_assembly_;
  bool last_reassembled_ = false;
  int assemblies_ = 0;
};

struct ConstitutiveState {
  QuadField stress;
  TangentField tangent;
  InternalState trial;
};

/// One constitutive sweep at total strain e + eps_fluct against the
/// committed internal state g. Pure: neither the map nor g are mutated.
ConstitutiveState constitutive_sweep(const GridLayout& layout,
                                     const MaterialMap& map,
                                     const InternalState& g,
                                     const Eigen::VectorXd& e,
                                     const QuadField& eps_fluct);

struct NewtonOutcome {
  NodalField u;             ///< periodic fluctuation displacement
  InternalState internal;   ///< committed internal variables
  QuadField stress;         ///< stress at the returned state
  Eigen::VectorXd average_stress;
  SolveReport report;
  bool converged = false;
};

/**
 * Incremental Newton-PCG solve of the discrete equilibrium at macroscopic
 * strain e. The residual is b = -D^T W sigma(e + D u, g); the tangent and
 * (on drift) the preconditioner are refreshed every step. Newton stops on
 * the configured increment criterion or when the equilibrium residual has
 * dropped by eta_newton in the M^{-1} norm, which makes linear problems
 * converge in exactly one step. Internal variables are committed only on
 * convergence; g0 is never mutated.
 */
NewtonOutcome newton_solve(const GridLayout& layout, const MaterialMap& map,
                           const InternalState& g0, const Eigen::VectorXd& e,
                           const SolveConfig& cfg, PrecondManager& precond,
                           const NodalField* warm_start = nullptr);

struct LoadStepResult {
  Eigen::VectorXd load;
  NewtonOutcome outcome;
};

/// Run a load program: one Newton solve per macroscopic strain, warm
/// started from the previous step, committing internal variables between
/// accepted steps.
std::vector<LoadStepResult> run_load_program(
    const GridLayout& layout, const MaterialMap& map,
    const std::vector<Eigen::VectorXd>& loads, const SolveConfig& cfg,
    const ReferencePolicy& policy);

/// Volume-averaged stress (1/|Y|) sum_Q w^Q sigma(Q).
Eigen::VectorXd average_stress(const GridLayout& layout,
                               const QuadField& sigma);

}  // namespace homfe

#endif
