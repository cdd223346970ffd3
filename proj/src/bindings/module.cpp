// Python bindings for the homogenization core: grids, materials, the
// matrix-free operators, the Fourier preconditioner and the solver
// drivers, with numpy arrays on the boundary.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "homfe/mandel.hpp"
#include "homfe/microstructure.hpp"
#include "homfe/operators.hpp"
#include "homfe/problem.hpp"
#include "homfe/projection.hpp"
#include "homfe/solver.hpp"
#include "homfe/spectral.hpp"

namespace py = pybind11;
using namespace homfe;

namespace {

NodalField nodal_from_array(const GridLayout& g,
                            const py::array_t<double>& arr) {
  const auto buf = arr.request();
  if (buf.ndim != 2 || buf.shape[1] != g.num_nodes()) {
    throw ValidationError("expected a (components, num_nodes) array");
  }
  NodalField f(static_cast<int>(buf.shape[0]), g.num_nodes());
  auto a = arr.unchecked<2>();
  for (int c = 0; c < f.components; ++c) {
    for (Index i = 0; i < f.nodes; ++i) f(c, i) = a(c, i);
  }
  return f;
}

py::array_t<double> nodal_to_array(const NodalField& f) {
  py::array_t<double> arr({static_cast<py::ssize_t>(f.components),
                           static_cast<py::ssize_t>(f.nodes)});
  auto a = arr.mutable_unchecked<2>();
  for (int c = 0; c < f.components; ++c) {
    for (Index i = 0; i < f.nodes; ++i) a(c, i) = f(c, i);
  }
  return arr;
}

QuadField quad_from_array(const GridLayout& g, const py::array_t<double>& arr) {
  const auto buf = arr.request();
  if (buf.ndim != 2 || buf.shape[0] != g.num_quads()) {
    throw ValidationError("expected a (num_quads, components) array");
  }
  QuadField f(static_cast<int>(buf.shape[1]), g.num_quads());
  auto a = arr.unchecked<2>();
  for (Index q = 0; q < f.quads; ++q) {
    for (int k = 0; k < f.components; ++k) f.at(q)[k] = a(q, k);
  }
  return f;
}

py::array_t<double> quad_to_array(const QuadField& f) {
  py::array_t<double> arr({static_cast<py::ssize_t>(f.quads),
                           static_cast<py::ssize_t>(f.components)});
  auto a = arr.mutable_unchecked<2>();
  for (Index q = 0; q < f.quads; ++q) {
    for (int k = 0; k < f.components; ++k) a(q, k) = f.at(q)[k];
  }
  return arr;
}

TangentField tangent_from_array(const GridLayout& g,
                                const py::array_t<double>& arr) {
  const auto buf = arr.request();
  if (buf.ndim != 3 || buf.shape[0] != g.num_quads() ||
      buf.shape[1] != buf.shape[2]) {
    throw ValidationError("expected a (num_quads, m, m) array");
  }
  TangentField t(static_cast<int>(buf.shape[1]), g.num_quads());
  auto a = arr.unchecked<3>();
  for (Index q = 0; q < t.quads; ++q) {
    auto blk = t.block(q);
    for (int i = 0; i < t.m; ++i) {
      for (int j = 0; j < t.m; ++j) blk(i, j) = a(q, i, j);
    }
  }
  return t;
}

MaterialMap map_from_python(const GridLayout& g,
                            const std::vector<MaterialModel>& catalog,
                            const py::array_t<std::uint8_t>& phases) {
  const auto buf = phases.request();
  if (buf.ndim != 1 || buf.shape[0] != g.num_pixels()) {
    throw ValidationError("expected a flat (num_pixels,) uint8 phase map");
  }
  MaterialMap map;
  map.catalog = catalog;
  auto a = phases.unchecked<1>();
  map.phase.resize(static_cast<std::size_t>(g.num_pixels()));
  for (Index p = 0; p < g.num_pixels(); ++p) {
    map.phase[static_cast<std::size_t>(p)] = a(p);
  }
  map.validate(g);
  return map;
}

SolveConfig config_from_kwargs(double eta_newton, double eta_cg,
                               int max_newton, int max_cg,
                               double reassembly_threshold) {
  SolveConfig cfg;
  cfg.eta_newton = eta_newton;
  cfg.eta_cg = eta_cg;
  cfg.max_newton = max_newton;
  cfg.max_cg = max_cg;
  cfg.reassembly_threshold = reassembly_threshold;
  cfg.validate();
  return cfg;
}

ReferencePolicy policy_from_string(const std::string& name, double scale) {
  if (name == "volume-mean") return ReferencePolicy::volume_mean();
  if (name == "identity-scaled") return ReferencePolicy::identity_scaled(scale);
  throw ValidationError("reference policy must be 'volume-mean' or "
                        "'identity-scaled' (pass an explicit matrix instead)");
}

py::dict report_to_dict(const SolveReport& r) {
  py::dict d;
  d["cause"] = to_string(r.cause);
  d["newton_steps"] = r.newton_steps();
  d["cg_total"] = r.total_cg();
  py::list steps;
  for (const auto& s : r.steps) {
    py::dict sd;
    sd["cg_iterations"] = s.cg_iterations;
    sd["residual_initial"] = s.residual_initial;
    sd["residual_final"] = s.residual_final;
    sd["increment_rel"] = s.increment_rel;
    sd["precond_reassembled"] = s.precond_reassembled;
    steps.append(sd);
  }
  d["steps"] = steps;
  d["seconds_total"] = r.seconds_total;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Matrix-free FFT-preconditioned finite element homogenization "
            "on periodic regular grids";

  py::register_exception<ValidationError>(m, "ValidationError",
                                          PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalSolverError",
                                         PyExc_RuntimeError);

  py::class_<GridLayout>(m, "Grid")
      .def(py::init([](std::vector<Index> dims, std::vector<double> lengths,
                       const std::string& stencil) {
             return GridLayout(CellSpec{std::move(dims), std::move(lengths)},
                               stencil_kind_from_string(stencil));
           }),
           py::arg("dims"), py::arg("lengths"), py::arg("stencil"))
      .def_property_readonly("dim", &GridLayout::dim)
      .def_property_readonly("num_pixels", &GridLayout::num_pixels)
      .def_property_readonly("num_nodes", &GridLayout::num_nodes)
      .def_property_readonly("num_quads", &GridLayout::num_quads)
      .def_property_readonly("nodes_per_pixel", &GridLayout::nodes_per_pixel)
      .def_property_readonly("quads_per_pixel", &GridLayout::quads_per_pixel)
      .def_property_readonly("cell_volume",
                             [](const GridLayout& g) {
                               return g.cell().cell_volume();
                             })
      .def_property_readonly(
          "stencil", [](const GridLayout& g) {
            return to_string(g.stencil().kind);
          })
      .def("quad_weights", [](const GridLayout& g) {
        Eigen::VectorXd w(g.num_quads());
        for (Index q = 0; q < g.num_quads(); ++q) {
          w[q] = g.quad_weight(static_cast<int>(q % g.quads_per_pixel()));
        }
        return w;
      });

  py::class_<MaterialModel>(m, "Material")
      .def_static("linear_elastic", &MaterialModel::linear_elastic,
                  py::arg("stiffness"))
      .def_static("isotropic_elastic", &MaterialModel::isotropic_elastic,
                  py::arg("bulk"), py::arg("shear"), py::arg("dim"))
      .def_static("conductivity", &MaterialModel::conductivity,
                  py::arg("matrix"))
      .def_static("isotropic_conductivity",
                  &MaterialModel::isotropic_conductivity, py::arg("kappa"),
                  py::arg("dim"))
      .def_static("j2_plastic", &MaterialModel::j2_plastic, py::arg("bulk"),
                  py::arg("shear"), py::arg("yield_stress"),
                  py::arg("hardening"), py::arg("dim"))
      .def_property_readonly("dim", &MaterialModel::dim)
      .def_property_readonly("flux_components",
                             &MaterialModel::flux_components)
      .def_property_readonly("internal_width", &MaterialModel::internal_width)
      .def("evaluate",
           [](const MaterialModel& mat, const Eigen::VectorXd& eps,
              const Eigen::VectorXd& g) {
             Eigen::VectorXd sigma, g_new;
             Eigen::MatrixXd tangent;
             mat.evaluate(eps, g, sigma, tangent, g_new);
             return py::make_tuple(sigma, tangent, g_new);
           },
           py::arg("strain"), py::arg("internal"));

  m.def("mandel_dim", &mandel_dim, py::arg("dim"));
  m.def("mandel_identity", &mandel_identity, py::arg("dim"));
  m.def("isotropic_stiffness", &isotropic_stiffness, py::arg("bulk"),
        py::arg("shear"), py::arg("dim"));
  m.def("to_mandel", &to_mandel, py::arg("tensor"));
  m.def("from_mandel", &from_mandel, py::arg("vector"));

  m.def(
      "gradient_apply",
      [](const GridLayout& g, const py::array_t<double>& u) {
        return quad_to_array(gradient_apply(g, nodal_from_array(g, u)));
      },
      py::arg("grid"), py::arg("u"),
      "Symmetrized gradient (or scalar gradient) at every quadrature point");
  m.def(
      "divergence_apply",
      [](const GridLayout& g, const py::array_t<double>& s, bool weighted) {
        return nodal_to_array(
            divergence_apply(g, quad_from_array(g, s), weighted));
      },
      py::arg("grid"), py::arg("s"), py::arg("weighted") = true,
      "Weighted discrete divergence, the adjoint of gradient_apply");
  m.def(
      "apply_operator",
      [](const GridLayout& g, const py::array_t<double>& tangent,
         const py::array_t<double>& u) {
        return nodal_to_array(apply_tangent_operator(
            g, tangent_from_array(g, tangent), nodal_from_array(g, u)));
      },
      py::arg("grid"), py::arg("tangent"), py::arg("u"),
      "Fused matrix-free application of D^T W C D");

  py::class_<FrequencyBlockDiag>(m, "Preconditioner")
      .def_property_readonly("block_dim", &FrequencyBlockDiag::block_dim)
      .def_property_readonly("num_frequencies",
                             &FrequencyBlockDiag::num_frequencies)
      .def_property_readonly("inverted", &FrequencyBlockDiag::inverted);

  m.def(
      "assemble_preconditioner",
      [](const GridLayout& g, const Eigen::MatrixXd& c_ref, int components,
         bool weighted) {
        return invert_blocks(
            assemble_reference(g, c_ref, components, weighted));
      },
      py::arg("grid"), py::arg("c_ref"), py::arg("components"),
      py::arg("weighted") = true,
      "Impulse-probed, FFT-diagonalized and pseudo-inverted reference "
      "operator");
  m.def(
      "apply_preconditioner",
      [](const GridLayout& g, const FrequencyBlockDiag& blocks,
         const py::array_t<double>& r) {
        return nodal_to_array(
            apply_preconditioner(g, blocks, nodal_from_array(g, r)));
      },
      py::arg("grid"), py::arg("preconditioner"), py::arg("r"));
  m.def(
      "gamma_apply",
      [](const GridLayout& g, const FrequencyBlockDiag& blocks,
         const py::array_t<double>& s) {
        return quad_to_array(gamma_apply(g, blocks, quad_from_array(g, s)));
      },
      py::arg("grid"), py::arg("preconditioner"), py::arg("s"),
      "Compatibility projection D (D^T C_ref D)^+ D^T");

  m.def(
      "volume_average",
      [](const GridLayout& g, const py::array_t<double>& s) {
        return volume_average(g, quad_from_array(g, s));
      },
      py::arg("grid"), py::arg("s"));

  m.def(
      "eigenvalue_bounds",
      [](const GridLayout& g, const py::array_t<double>& tangent,
         const Eigen::MatrixXd& c_ref, int components) {
        const BoundSequences b =
            eigenvalue_bounds(g, tangent_from_array(g, tangent), c_ref,
                              components);
        return py::make_tuple(b.lower, b.upper, condition_estimate(b));
      },
      py::arg("grid"), py::arg("tangent"), py::arg("c_ref"),
      py::arg("components"),
      "Sorted two-sided eigenvalue bounds and the condition estimate");

  m.def(
      "newton_solve",
      [](const GridLayout& g, const std::vector<MaterialModel>& catalog,
         const py::array_t<std::uint8_t>& phases, const Eigen::VectorXd& e,
         double eta_newton, double eta_cg, int max_newton, int max_cg,
         double reassembly_threshold, const std::string& reference,
         double reference_scale) {
        const MaterialMap map = map_from_python(g, catalog, phases);
        const SolveConfig cfg =
            config_from_kwargs(eta_newton, eta_cg, max_newton, max_cg,
                               reassembly_threshold);
        PrecondManager precond(policy_from_string(reference, reference_scale),
                               cfg.reassembly_threshold,
                               map.node_components(g.dim()));
        const NewtonOutcome out =
            newton_solve(g, map, map.make_state(g), e, cfg, precond);
        py::dict d;
        d["converged"] = out.converged;
        d["u"] = nodal_to_array(out.u);
        d["stress"] = quad_to_array(out.stress);
        d["average_stress"] = out.average_stress;
        d["report"] = report_to_dict(out.report);
        return d;
      },
      py::arg("grid"), py::arg("materials"), py::arg("phases"), py::arg("e"),
      py::arg("eta_newton") = 1e-5, py::arg("eta_cg") = 1e-5,
      py::arg("max_newton") = 25, py::arg("max_cg") = 20000,
      py::arg("reassembly_threshold") = 0.1,
      py::arg("reference") = "volume-mean", py::arg("reference_scale") = 1.0,
      "One incremental Newton-PCG solve at macroscopic strain e");

  m.def(
      "run_problem",
      [](const std::string& path, std::optional<std::uint64_t> seed) {
        const Problem p = load_problem(path, seed);
        const GridLayout layout = p.layout();
        const MaterialMap map = p.material_map();
        map.validate(layout);
        const auto results =
            run_load_program(layout, map, p.loading, p.solver, p.reference);
        py::list steps;
        bool converged = !results.empty();
        for (const auto& step : results) {
          py::dict sd;
          sd["load"] = step.load;
          sd["average_stress"] = step.outcome.average_stress;
          sd["converged"] = step.outcome.converged;
          sd["report"] = report_to_dict(step.outcome.report);
          steps.append(sd);
          converged = converged && step.outcome.converged;
        }
        py::dict d;
        d["steps"] = steps;
        d["converged"] =
            converged && results.size() == p.loading.size();
        return d;
      },
      py::arg("path"), py::arg("seed") = std::nullopt,
      "Load a problem file and run its load program in memory");

  auto as_phase_array = [](std::vector<std::uint8_t> v) {
    py::array_t<std::uint8_t> arr(static_cast<py::ssize_t>(v.size()));
    std::memcpy(arr.mutable_data(), v.data(), v.size());
    return arr;
  };
  m.def(
      "coated_sphere_phases",
      [as_phase_array](std::vector<Index> dims, std::vector<double> lengths,
                       double r1, double r2) {
        return as_phase_array(coated_sphere_phases(
            CellSpec{std::move(dims), std::move(lengths)}, r1, r2));
      },
      py::arg("dims"), py::arg("lengths"), py::arg("r1") = 0.2,
      py::arg("r2") = 0.4);
  m.def(
      "square_inclusion_phases",
      [as_phase_array](std::vector<Index> dims, std::vector<double> lengths,
                       double half_diagonal) {
        return as_phase_array(square_inclusion_phases(
            CellSpec{std::move(dims), std::move(lengths)}, half_diagonal));
      },
      py::arg("dims"), py::arg("lengths"), py::arg("half_diagonal"));
  m.def(
      "random_two_phase",
      [as_phase_array](std::vector<Index> dims, std::vector<double> lengths,
                       double fraction, std::uint64_t seed) {
        return as_phase_array(random_two_phase(
            CellSpec{std::move(dims), std::move(lengths)}, fraction, seed));
      },
      py::arg("dims"), py::arg("lengths"), py::arg("fraction"),
      py::arg("seed"));
}
