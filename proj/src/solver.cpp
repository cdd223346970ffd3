#include "homfe/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "homfe/mandel.hpp"
#include "homfe/operators.hpp"

namespace homfe {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

void SolveConfig::validate() const {
  if (!(eta_newton > 0.0 && eta_newton < 1.0) ||
      !(eta_cg > 0.0 && eta_cg < 1.0)) {
    throw ValidationError("solver: tolerances must lie in (0,1)");
  }
  if (max_newton < 1 || max_cg < 1) {
    throw ValidationError("solver: iteration caps must be >= 1");
  }
  if (!(reassembly_threshold >= 0.0)) {
    throw ValidationError("solver: reassembly threshold must be >= 0");
  }
}

std::string to_string(TerminationCause cause) {
  switch (cause) {
    case TerminationCause::Converged: return "converged";
    case TerminationCause::CgStall: return "cg-stall";
    case TerminationCause::NewtonCap: return "newton-cap";
  }
  return "unknown";
}

int SolveReport::total_cg() const {
  int n = 0;
  for (const auto& s : steps) n += s.cg_iterations;
  return n;
}

PcgOutcome pcg_solve(const LinearOperator& apply_a,
                     const LinearOperator& apply_minv, const NodalField& b,
                     double eta, int it_max, const IterateObserver& observer) {
  PcgOutcome out;
  out.x = NodalField(b.components, b.nodes);

  // r.z clamped at zero: for the PSD preconditioner the scalar is
  // non-negative up to rounding noise on numerically zero residuals.
  const auto guarded_rz = [](const NodalField& r, const NodalField& z) {
    return std::max(r.data.dot(z.data), 0.0);
  };

  NodalField r = b;
  NodalField z = apply_minv(r);
  double rz = guarded_rz(r, z);
  const double norm0 = std::sqrt(rz);
  out.history.push_back(norm0);
  if (norm0 == 0.0) {
    out.converged = true;
    return out;
  }

  NodalField p = z;
  for (int k = 1; k <= it_max; ++k) {
    const NodalField ap = apply_a(p);
    const double p_ap = p.data.dot(ap.data);
    if (p_ap <= 0.0) {
      throw NumericalError(
          "pcg: non-positive curvature, operator is not positive definite");
    }
    const double alpha = rz / p_ap;
    out.x.data += alpha * p.data;
    r.data -= alpha * ap.data;
    z = apply_minv(r);
    const double rz_next = guarded_rz(r, z);
    out.iterations = k;
    out.history.push_back(std::sqrt(rz_next));
    if (observer) observer(out.x);
    if (std::sqrt(rz_next) <= eta * norm0) {
      out.converged = true;
      break;
    }
    p.data = z.data + (rz_next / rz) * p.data;
    rz = rz_next;
  }
  out.x.remove_component_means();
  return out;
}

Eigen::MatrixXd ReferencePolicy::resolve(const GridLayout& layout,
                                         const TangentField& tangent) const {
  switch (kind) {
    case Kind::IdentityScaled: {
      if (!(scale > 0.0)) {
        throw ValidationError("reference: identity scale must be > 0");
      }
      return scale * Eigen::MatrixXd::Identity(tangent.m, tangent.m);
    }
    case Kind::VolumeMean:
      return volume_average_tangent(layout, tangent);
    case Kind::Explicit: {
      if (matrix.rows() != tangent.m || matrix.cols() != tangent.m) {
        throw ValidationError("reference: explicit matrix has wrong size");
      }
      return matrix;
    }
  }
  throw ValidationError("reference: invalid policy");
}

const FrequencyBlockDiag& PrecondManager::ensure(const GridLayout& layout,
                                                 const TangentField& tangent) {
  last_reassembled_ = false;
  const Eigen::MatrixXd mean = volume_average_tangent(layout, tangent);
  bool need = !inverted_.has_value();
  if (!need) {
    const double base = mean_at_assembly_.norm();
    const double drift = (mean - mean_at_assembly_).norm();
    need = drift > threshold_ * base;
  }
  if (need) {
    const Eigen::MatrixXd c_ref = policy_.resolve(layout, tangent);
    if (!inverted_.has_value() || c_ref != c_ref_used_) {
      inverted_ = invert_blocks(
          assemble_reference(layout, c_ref, components_, weighted_));
      c_ref_used_ = c_ref;
      mean_at_assembly_ = mean;
      last_reassembled_ = true;
      ++assemblies_;
    }
  }
  return *inverted_;
}

ConstitutiveState constitutive_sweep(const GridLayout& layout,
                                     const MaterialMap& map,
                                     const InternalState& g,
                                     const Eigen::VectorXd& e,
                                     const QuadField& eps_fluct) {
  const int m = map.flux_components();
  if (e.size() != m) {
    throw ValidationError("load vector has " + std::to_string(e.size()) +
                          " components, expected " + std::to_string(m));
  }
  const int nq = layout.quads_per_pixel();
  ConstitutiveState out{QuadField(m, layout.num_quads()),
                        TangentField(m, layout.num_quads()),
                        InternalState(map.internal_width(),
                                      layout.num_quads())};
  out.tangent.pixel_constant = true;
  Eigen::VectorXd eps(m);
  for (Index q = 0; q < layout.num_quads(); ++q) {
    const MaterialModel& model = map.at_pixel(q / nq);
    for (int k = 0; k < m; ++k) eps[k] = e[k] + eps_fluct.at(q)[k];
    model.evaluate(eps.data(), g.at(q), out.stress.at(q),
                   out.tangent.block(q).data(), out.trial.at(q));
    if (model.nonlinear()) out.tangent.pixel_constant = false;
  }
  return out;
}

NewtonOutcome newton_solve(const GridLayout& layout, const MaterialMap& map,
                           const InternalState& g0, const Eigen::VectorXd& e,
                           const SolveConfig& cfg, PrecondManager& precond,
                           const NodalField* warm_start) {
  cfg.validate();
  map.validate(layout);
  if (!e.allFinite()) {
    throw ValidationError("load vector has non-finite entries");
  }
  if (g0.width != map.internal_width() || g0.quads != layout.num_quads()) {
    throw ValidationError("internal state does not match layout and catalog");
  }
  const auto t_total = Clock::now();
  const int c = map.node_components(layout.dim());

  NewtonOutcome out;
  out.u = warm_start ? *warm_start : NodalField(c, layout.num_nodes());
  if (out.u.components != c || out.u.nodes != layout.num_nodes()) {
    throw ValidationError("warm start has wrong shape");
  }

  double bnorm0 = 0.0;
  double increment_rel = std::numeric_limits<double>::infinity();
  bool have_increment = false;

  for (int step = 0;; ++step) {
    auto t0 = Clock::now();
    const QuadField eps_fluct = gradient_apply(layout, out.u);
    ConstitutiveState state =
        constitutive_sweep(layout, map, g0, e, eps_fluct);
    out.report.seconds_constitutive += seconds_since(t0);

    NodalField b = divergence_apply(layout, state.stress);
    b.data = -b.data;

    t0 = Clock::now();
    const FrequencyBlockDiag& minv = precond.ensure(layout, state.tangent);
    const bool reassembled = precond.last_call_reassembled();
    out.report.seconds_assembly += seconds_since(t0);

    const NodalField z = apply_preconditioner(layout, minv, b);
    const double bnorm = std::sqrt(std::max(0.0, b.data.dot(z.data)));
    if (step == 0) bnorm0 = bnorm;

    // A residual whose preconditioned strain response sits at rounding
    // noise relative to the total strain is equilibrium: the right-hand
    // side of a uniform problem is zero only up to summation round-off.
    QuadField eps_total = eps_fluct;
    for (Index q = 0; q < eps_total.quads; ++q) {
      eps_total.vec(q) += e;
    }
    const double strain_scale = weighted_norm(layout, eps_total);
    const bool b_is_zero =
        bnorm == 0.0 || weighted_norm(layout, gradient_apply(layout, z)) <=
                            1e-12 * strain_scale;

    const bool residual_ok = bnorm <= cfg.eta_newton * bnorm0;
    const bool increment_ok = have_increment && increment_rel <= cfg.eta_newton;
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

    t0 = Clock::now();
    PcgOutcome pcg;
    if (b_is_zero) {
      pcg.x = NodalField(c, layout.num_nodes());
      pcg.history = {bnorm};
      pcg.converged = true;
    } else {
      pcg = pcg_solve(
          [&](const NodalField& v) {
            return apply_tangent_operator(layout, state.tangent, v);
          },
          [&](const NodalField& v) {
            return apply_preconditioner(layout, minv, v);
          },
          b, cfg.eta_cg, cfg.max_cg);
    }
    out.report.seconds_cg += seconds_since(t0);

    out.u.data += pcg.x.data;
    out.u.remove_component_means();

    if (cfg.criterion == SolveConfig::NewtonCriterion::StrainIncrement) {
      const QuadField d_eps = gradient_apply(layout, pcg.x);
      const QuadField eps_new = gradient_apply(layout, out.u);
      const double num = weighted_norm(layout, d_eps);
      const double den = weighted_norm(layout, eps_new);
      increment_rel = den > 0.0 ? num / den : (num > 0.0 ? 1.0 : 0.0);
    } else {
      const double num = pcg.x.data.norm();
      const double den = out.u.data.norm();
      increment_rel = den > 0.0 ? num / den : (num > 0.0 ? 1.0 : 0.0);
    }
    have_increment = true;

    out.report.steps.push_back({pcg.iterations, bnorm, pcg.history.back(),
                                increment_rel, reassembled});

    if (!pcg.converged) {
      out.report.cause = TerminationCause::CgStall;
      out.converged = false;
      out.internal = g0;
      // Recompute the state at the returned iterate for reporting.
      ConstitutiveState last = constitutive_sweep(
          layout, map, g0, e, gradient_apply(layout, out.u));
      out.stress = std::move(last.stress);
      break;
    }
  }

  out.average_stress = average_stress(layout, out.stress);
  out.report.seconds_total = seconds_since(t_total);
  return out;
}

std::vector<LoadStepResult> run_load_program(
    const GridLayout& layout, const MaterialMap& map,
    const std::vector<Eigen::VectorXd>& loads, const SolveConfig& cfg,
    const ReferencePolicy& policy) {
  if (loads.empty()) {
    throw ValidationError("loading: at least one load step is required");
  }
  PrecondManager precond(policy, cfg.reassembly_threshold,
                         map.node_components(layout.dim()));
  std::vector<LoadStepResult> results;
  InternalState g = map.make_state(layout);
  const NodalField* warm = nullptr;
  for (const auto& e : loads) {
    NewtonOutcome outcome =
        newton_solve(layout, map, g, e, cfg, precond, warm);
    if (outcome.converged) g = outcome.internal;
    results.push_back({e, std::move(outcome)});
    if (!results.back().outcome.converged) break;
    warm = &results.back().outcome.u;
  }
  return results;
}

Eigen::VectorXd average_stress(const GridLayout& layout,
                               const QuadField& sigma) {
  return volume_average(layout, sigma);
}

}  // namespace homfe
