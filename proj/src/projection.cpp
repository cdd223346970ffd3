#include "homfe/projection.hpp"

#include <cmath>
#include <limits>

#include "homfe/operators.hpp"

namespace homfe {

namespace {

void require_equal_weights(const GridLayout& layout) {
  if (!layout.equal_weights()) {
    throw ValidationError(
        "projection: stencil has unequal quadrature weights");
  }
}

}  // namespace

FrequencyBlockDiag assemble_projection_blocks(const GridLayout& layout,
                                              const Eigen::MatrixXd& c_ref,
                                              int components) {
  require_equal_weights(layout);
  return invert_blocks(
      assemble_reference(layout, c_ref, components, /*weighted=*/false));
}

QuadField gamma_apply(const GridLayout& layout,
                      const FrequencyBlockDiag& inv_blocks,
                      const QuadField& s) {
  require_equal_weights(layout);
  if (inv_blocks.weighted()) {
    throw ValidationError(
        "gamma_apply: blocks must be assembled without the weight fusion");
  }
  const NodalField div = divergence_apply(layout, s, /*weighted=*/false);
  const NodalField z = apply_preconditioner(layout, inv_blocks, div);
  return gradient_apply(layout, z);
}

namespace {

// Plain CG on the projected strain-space system Gamma C delta = b with the
// Euclidean inner product; the mirror image of the displacement-space PCG.
struct StrainCgOutcome {
  QuadField x;
  int iterations = 0;
  std::vector<double> history;
  bool converged = false;
};

StrainCgOutcome strain_cg(const GridLayout& layout,
                          const FrequencyBlockDiag& inv_blocks,
                          const TangentField& tangent, const QuadField& b,
                          double eta, int it_max) {
  StrainCgOutcome out;
  out.x = QuadField(b.components, b.quads);

  QuadField r = b;
  double rr = std::max(r.data.dot(r.data), 0.0);
  const double norm0 = std::sqrt(rr);
  out.history.push_back(norm0);
  if (norm0 == 0.0) {
    out.converged = true;
    return out;
  }

  QuadField p = r;
  for (int k = 1; k <= it_max; ++k) {
    const QuadField ap =
        gamma_apply(layout, inv_blocks, tangent_multiply(tangent, p));
    const double p_ap = p.data.dot(ap.data);
    if (p_ap <= 0.0) {
      throw NumericalError(
          "strain cg: non-positive curvature, operator is not positive "
          "definite");
    }
    const double alpha = rr / p_ap;
    out.x.data += alpha * p.data;
    r.data -= alpha * ap.data;
    const double rr_next = std::max(r.data.dot(r.data), 0.0);
    out.iterations = k;
    out.history.push_back(std::sqrt(rr_next));
    if (std::sqrt(rr_next) <= eta * norm0) {
      out.converged = true;
      break;
    }
    p.data = r.data + (rr_next / rr) * p.data;
    rr = rr_next;
  }
  return out;
}

}  // namespace

SbOutcome sb_newton_solve(const GridLayout& layout, const MaterialMap& map,
                          const InternalState& g0, const Eigen::VectorXd& e,
                          const SolveConfig& cfg, const Eigen::MatrixXd& c_ref,
                          const QuadField* warm_start) {
  cfg.validate();
  map.validate(layout);
  require_equal_weights(layout);
  const int c = map.node_components(layout.dim());
  const int m = map.flux_components();

  const FrequencyBlockDiag inv_blocks =
      assemble_projection_blocks(layout, c_ref, c);

  SbOutcome out;
  out.strain =
      warm_start ? *warm_start : QuadField(m, layout.num_quads());
  if (out.strain.components != m || out.strain.quads != layout.num_quads()) {
    throw ValidationError("sb warm start has wrong shape");
  }

  double bnorm0 = 0.0;
  double increment_rel = std::numeric_limits<double>::infinity();
  bool have_increment = false;

  for (int step = 0;; ++step) {
    ConstitutiveState state =
        constitutive_sweep(layout, map, g0, e, out.strain);

    QuadField b = gamma_apply(layout, inv_blocks, state.stress);
    b.data = -b.data;
    const double bnorm = b.data.norm();
    if (step == 0) bnorm0 = bnorm;

    // Noise floor mirroring the displacement scheme: the projected
    // residual of a uniform state is zero only up to round-off.
    QuadField eps_total = out.strain;
    for (Index q = 0; q < eps_total.quads; ++q) {
      eps_total.vec(q) += e;
    }
    const bool b_is_zero =
        bnorm == 0.0 || bnorm <= 1e-12 * eps_total.data.norm();

    const bool residual_ok = bnorm <= cfg.eta_newton * bnorm0;
    const bool increment_ok =
        have_increment && increment_rel <= cfg.eta_newton;
    if (step > 0 && (increment_ok || residual_ok)) {
      out.report.cause = TerminationCause::Converged;
      out.converged = true;
      out.internal = std::move(state.trial);
      out.stress = std::move(state.stress);
      break;
    }
    if (step == cfg.max_newton) {
      out.report.cause = TerminationCause::NewtonCap;
      out.converged = false;
      out.internal = g0;
      out.stress = std::move(state.stress);
      break;
    }

    StrainCgOutcome cg;
    if (b_is_zero) {
      cg.x = QuadField(m, layout.num_quads());
      cg.history = {bnorm};
      cg.converged = true;
    } else {
      cg = strain_cg(layout, inv_blocks, state.tangent, b, cfg.eta_cg,
                     cfg.max_cg);
    }

    out.strain.data += cg.x.data;

    const double num = weighted_norm(layout, cg.x);
    const double den = weighted_norm(layout, out.strain);
    increment_rel = den > 0.0 ? num / den : (num > 0.0 ? 1.0 : 0.0);
    have_increment = true;

    out.report.steps.push_back(
        {cg.iterations, bnorm, cg.history.back(), increment_rel, step == 0});

    if (!cg.converged) {
      out.report.cause = TerminationCause::CgStall;
      out.converged = false;
      out.internal = g0;
      ConstitutiveState last =
          constitutive_sweep(layout, map, g0, e, out.strain);
      out.stress = std::move(last.stress);
      break;
    }
  }

  out.average_stress = volume_average(layout, out.stress);
  return out;
}

bool DbSbComparison::newton_counts_equal() const {
  if (db_reports.size() != sb_reports.size()) return false;
  for (std::size_t i = 0; i < db_reports.size(); ++i) {
    if (db_reports[i].newton_steps() != sb_reports[i].newton_steps()) {
      return false;
    }
  }
  return true;
}

bool DbSbComparison::cg_counts_match(int slack) const {
  if (!newton_counts_equal()) return false;
  for (std::size_t i = 0; i < db_reports.size(); ++i) {
    for (std::size_t s = 0; s < db_reports[i].steps.size(); ++s) {
      const int a = db_reports[i].steps[s].cg_iterations;
      const int b = sb_reports[i].steps[s].cg_iterations;
      if (std::abs(a - b) > slack) return false;
    }
  }
  return true;
}

DbSbComparison compare_db_sb(const GridLayout& layout, const MaterialMap& map,
                             const std::vector<Eigen::VectorXd>& loads,
                             const SolveConfig& cfg,
                             const Eigen::MatrixXd& c_ref) {
  require_equal_weights(layout);
  DbSbComparison out;
  out.converged = true;

  // Displacement scheme with the same fixed reference tangent.
  PrecondManager precond(ReferencePolicy::explicit_matrix(c_ref),
                         cfg.reassembly_threshold,
                         map.node_components(layout.dim()));
  InternalState g_db = map.make_state(layout);
  std::vector<NodalField> db_solutions;
  const NodalField* warm_db = nullptr;
  for (const auto& e : loads) {
    NewtonOutcome res = newton_solve(layout, map, g_db, e, cfg, precond,
                                     warm_db);
    out.converged = out.converged && res.converged;
    if (res.converged) g_db = res.internal;
    out.db_reports.push_back(res.report);
    out.db_average_stress.push_back(res.average_stress);
    db_solutions.push_back(std::move(res.u));
    warm_db = &db_solutions.back();
  }

  InternalState g_sb = map.make_state(layout);
  std::vector<QuadField> sb_solutions;
  const QuadField* warm_sb = nullptr;
  for (std::size_t i = 0; i < loads.size(); ++i) {
    SbOutcome res =
        sb_newton_solve(layout, map, g_sb, loads[i], cfg, c_ref, warm_sb);
    out.converged = out.converged && res.converged;
    if (res.converged) g_sb = res.internal;
    out.sb_reports.push_back(res.report);
    out.sb_average_stress.push_back(res.average_stress);
    sb_solutions.push_back(std::move(res.strain));
    warm_sb = &sb_solutions.back();

    const QuadField db_strain = gradient_apply(layout, db_solutions[i]);
    const double scale = db_strain.data.cwiseAbs().maxCoeff();
    const double diff =
        (sb_solutions[i].data - db_strain.data).cwiseAbs().maxCoeff();
    out.strain_discrepancy.push_back(scale > 0.0 ? diff / scale : diff);
  }
  return out;
}

}  // namespace homfe
