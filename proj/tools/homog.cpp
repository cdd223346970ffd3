// homog: command line front end for the FFT-preconditioned FE
// homogenization solver. Subcommands: solve, bounds, compare,
// probe-precond. Exit codes: 0 ok, 2 validation error, 3 non-convergence,
// 4 numerical abort.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "homfe/io.hpp"
#include "homfe/problem.hpp"
#include "homfe/projection.hpp"
#include "homfe/spectral.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace homfe;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitNumerical = 4;

struct CommonOpts {
  std::string problem;
  std::string out = ".";
  int threads = 1;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOpts* opts) {
  cmd->add_option("--problem", opts->problem, "problem file (JSON)")
      ->required()
      ->envname("HOMOG_PROBLEM");
  cmd->add_option("--out", opts->out, "output directory")
      ->envname("HOMOG_OUT");
  cmd->add_option("--threads", opts->threads,
                  "worker threads (reserved; execution is single threaded)")
      ->envname("HOMOG_THREADS");
  cmd->add_option("--seed", opts->seed, "seed for randomized templates")
      ->envname("HOMOG_SEED");
}

Problem load(const CommonOpts& opts) {
  Problem p = load_problem(opts.problem, opts.seed);
  fs::create_directories(opts.out);
  return p;
}

// Tangent field at zero strain against a fresh internal state; linear
// models report their constant tangent, J2 its elastic branch.
TangentField zero_state_tangent(const GridLayout& layout,
                                const MaterialMap& map, int m) {
  const InternalState g0(map.internal_width(), layout.num_quads());
  const QuadField eps(m, layout.num_quads());
  return constitutive_sweep(layout, map, g0, Eigen::VectorXd::Zero(m), eps)
      .tangent;
}

std::string qty_name(bool thermal, bool primal) {
  if (thermal) return primal ? "gradient" : "flux";
  return primal ? "strain" : "stress";
}

int cmd_solve(const CommonOpts& opts) {
  const Problem p = load(opts);
  const GridLayout layout = p.layout();
  const MaterialMap map = p.material_map();
  map.validate(layout);

  const auto results =
      run_load_program(layout, map, p.loading, p.solver, p.reference);

  const fs::path out(opts.out);
  write_phase_map(out / "phases.u8", p.phases);

  const int m = p.flux_components();
  std::vector<std::vector<std::string>> avg_rows;
  std::vector<std::vector<std::string>> report_rows;
  nlohmann::json status = nlohmann::json::array();

  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& step = results[i];
    const auto& o = step.outcome;
    const std::string tag = "_step" + std::to_string(i);

    write_field(out / ("u" + tag), o.u.data,
                {{o.u.components, o.u.nodes},
                 "node-planar",
                 p.thermal ? "temperature" : "displacement components",
                 p.thermal ? "temperature" : "length"});

    QuadField strain = gradient_apply(layout, o.u);
    for (Index q = 0; q < strain.quads; ++q) strain.vec(q) += step.load;
    write_field(out / (qty_name(p.thermal, true) + tag), strain.data,
                {{strain.quads, strain.components},
                 "quad-interleaved",
                 p.thermal ? "gradient components"
                           : "mandel strain components",
                 "dimensionless"});
    write_field(out / (qty_name(p.thermal, false) + tag), o.stress.data,
                {{o.stress.quads, o.stress.components},
                 "quad-interleaved",
                 p.thermal ? "flux components" : "mandel stress components",
                 "pressure"});

    std::vector<std::string> row{std::to_string(i)};
    for (int k = 0; k < m; ++k) row.push_back(format_double(step.load[k]));
    for (int k = 0; k < m; ++k) {
      row.push_back(format_double(o.average_stress[k]));
    }
    avg_rows.push_back(std::move(row));

    for (std::size_t s = 0; s < o.report.steps.size(); ++s) {
      const auto& ns = o.report.steps[s];
      report_rows.push_back({std::to_string(i), std::to_string(s),
                             std::to_string(ns.cg_iterations),
                             format_double(ns.residual_initial),
                             format_double(ns.residual_final),
                             format_double(ns.increment_rel),
                             ns.precond_reassembled ? "1" : "0"});
    }

    nlohmann::json st;
    st["load_step"] = i;
    st["cause"] = to_string(o.report.cause);
    st["converged"] = o.converged;
    st["newton_steps"] = o.report.newton_steps();
    st["cg_total"] = o.report.total_cg();
    st["seconds_total"] = o.report.seconds_total;
    st["seconds_cg"] = o.report.seconds_cg;
    st["seconds_constitutive"] = o.report.seconds_constitutive;
    st["seconds_assembly"] = o.report.seconds_assembly;
    status.push_back(st);

    std::cout << "step " << i << ": " << to_string(o.report.cause) << ", "
              << o.report.newton_steps() << " newton, "
              << o.report.total_cg() << " cg\n";
  }

  std::vector<std::string> avg_header{"step"};
  for (int k = 0; k < m; ++k) avg_header.push_back("e_" + std::to_string(k));
  for (int k = 0; k < m; ++k) {
    avg_header.push_back("avg_" + qty_name(p.thermal, false) + "_" +
                         std::to_string(k));
  }
  write_csv(out / "averages.csv", avg_header, avg_rows);
  write_csv(out / "report.csv",
            {"load_step", "newton_step", "cg_iterations", "residual_initial",
             "residual_final", "increment_rel", "precond_reassembled"},
            report_rows);

  nlohmann::json summary;
  summary["steps"] = status;
  summary["seed"] = p.seed;
  std::ofstream(out / "solve.json") << summary.dump(2) << "\n";

  const bool all_ok = results.size() == p.loading.size() &&
                      results.back().outcome.converged;
  return all_ok ? kExitOk : kExitNonConvergence;
}

int cmd_bounds(const CommonOpts& opts) {
  const Problem p = load(opts);
  const GridLayout layout = p.layout();
  const MaterialMap map = p.material_map();
  map.validate(layout);

  const TangentField tangent =
      zero_state_tangent(layout, map, p.flux_components());
  const Eigen::MatrixXd c_ref = p.reference.resolve(layout, tangent);
  const BoundSequences bounds =
      eigenvalue_bounds(layout, tangent, c_ref, p.node_components());
  const double estimate = condition_estimate(bounds);

  std::vector<std::vector<std::string>> rows;
  for (Eigen::Index i = 0; i < bounds.lower.size(); ++i) {
    rows.push_back({std::to_string(i), format_double(bounds.lower[i]),
                    format_double(bounds.upper[i])});
  }
  const fs::path out(opts.out);
  write_csv(out / "bounds.csv", {"index", "lower", "upper"}, rows);
  std::ofstream(out / "condition.txt") << format_double(estimate) << "\n";
  std::cout << "eigenvalue bounds: [" << format_double(bounds.lower.minCoeff())
            << ", " << format_double(bounds.upper.maxCoeff())
            << "], condition estimate " << format_double(estimate) << "\n";
  return kExitOk;
}

int cmd_compare(const CommonOpts& opts) {
  const Problem p = load(opts);
  const GridLayout layout = p.layout();
  const MaterialMap map = p.material_map();
  map.validate(layout);

  const TangentField tangent =
      zero_state_tangent(layout, map, p.flux_components());
  const Eigen::MatrixXd c_ref = p.reference.resolve(layout, tangent);

  const DbSbComparison cmp =
      compare_db_sb(layout, map, p.loading, p.solver, c_ref);

  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < cmp.db_reports.size(); ++i) {
    const auto& db = cmp.db_reports[i];
    const auto& sb = cmp.sb_reports[i];
    const std::size_t steps = std::max(db.steps.size(), sb.steps.size());
    for (std::size_t s = 0; s < steps; ++s) {
      auto int_cell = [&](const SolveReport& r) -> std::string {
        return s < r.steps.size()
                   ? std::to_string(r.steps[s].cg_iterations)
                   : "";
      };
      auto res_cell = [&](const SolveReport& r) -> std::string {
        return s < r.steps.size()
                   ? format_double(r.steps[s].residual_final)
                   : "";
      };
      rows.push_back({std::to_string(i), std::to_string(s), int_cell(db),
                      int_cell(sb), res_cell(db), res_cell(sb)});
    }
  }
  const fs::path out(opts.out);
  write_csv(out / "compare.csv",
            {"load_step", "newton_step", "db_cg", "sb_cg",
             "db_residual_final", "sb_residual_final"},
            rows);

  std::vector<std::vector<std::string>> summary;
  for (std::size_t i = 0; i < cmp.db_reports.size(); ++i) {
    summary.push_back({std::to_string(i),
                       std::to_string(cmp.db_reports[i].newton_steps()),
                       std::to_string(cmp.sb_reports[i].newton_steps()),
                       std::to_string(cmp.db_reports[i].total_cg()),
                       std::to_string(cmp.sb_reports[i].total_cg()),
                       format_double(cmp.strain_discrepancy[i])});
  }
  write_csv(out / "compare_summary.csv",
            {"load_step", "db_newton", "sb_newton", "db_cg_total",
             "sb_cg_total", "strain_discrepancy"},
            summary);

  for (const auto& row : summary) {
    std::cout << "step " << row[0] << ": newton " << row[1] << "/" << row[2]
              << ", cg " << row[3] << "/" << row[4] << ", discrepancy "
              << row[5] << "\n";
  }
  return cmp.converged ? kExitOk : kExitNonConvergence;
}

int cmd_probe_precond(const CommonOpts& opts) {
  const Problem p = load(opts);
  const GridLayout layout = p.layout();
  const MaterialMap map = p.material_map();
  map.validate(layout);

  const TangentField tangent =
      zero_state_tangent(layout, map, p.flux_components());
  const Eigen::MatrixXd c_ref = p.reference.resolve(layout, tangent);
  const FrequencyBlockDiag blocks =
      assemble_reference(layout, c_ref, p.node_components());

  std::vector<std::vector<std::string>> rows;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig;
  for (Index k = 0; k < blocks.num_frequencies(); ++k) {
    const auto f = blocks.fft().frequency(k);
    eig.compute(blocks.block(k), Eigen::EigenvaluesOnly);
    rows.push_back(
        {std::to_string(k), std::to_string(f[0]), std::to_string(f[1]),
         std::to_string(f[2]),
         blocks.flag(k) == FrequencyBlockDiag::BlockFlag::PseudoInverted
             ? "pseudo-inverted"
             : "invertible",
         format_double(eig.eigenvalues().minCoeff()),
         format_double(eig.eigenvalues().maxCoeff())});
  }
  const fs::path out(opts.out);
  write_csv(out / "precond_blocks.csv",
            {"index", "k0", "k1", "k2", "flag", "lambda_min", "lambda_max"},
            rows);
  std::cout << "frequency blocks: " << blocks.num_frequencies()
            << ", block dim " << blocks.block_dim() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Matrix-free FFT-preconditioned FE homogenization on periodic grids"};
  app.require_subcommand(1);

  CommonOpts solve_opts, bounds_opts, compare_opts, probe_opts;
  CLI::App* solve =
      app.add_subcommand("solve", "run the load program of a problem file");
  add_common(solve, &solve_opts);
  CLI::App* bounds = app.add_subcommand(
      "bounds", "two-sided eigenvalue bounds of the preconditioned operator");
  add_common(bounds, &bounds_opts);
  CLI::App* compare = app.add_subcommand(
      "compare", "displacement- vs strain-based scheme comparison");
  add_common(compare, &compare_opts);
  CLI::App* probe = app.add_subcommand(
      "probe-precond",
      "dump frequency-block diagnostics of the preconditioner");
  add_common(probe, &probe_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_opts);
    if (bounds->parsed()) return cmd_bounds(bounds_opts);
    if (compare->parsed()) return cmd_compare(compare_opts);
    if (probe->parsed()) return cmd_probe_precond(probe_opts);
  } catch (const ValidationError& err) {
    std::cerr << "validation error: " << err.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& err) {
    std::cerr << "numerical abort: " << err.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitNumerical;
  }
  return kExitValidation;
}
