#include <cmath>

#include "doctest.h"
#include "homfe/microstructure.hpp"
#include "homfe/solver.hpp"
#include "support/oracles.hpp"

using namespace homfe;

namespace {

LinearOperator make_k(const GridLayout& g, const TangentField& t) {
  return [&g, &t](const NodalField& v) {
    return apply_tangent_operator(g, t, v);
  };
}

LinearOperator make_minv(const GridLayout& g, const FrequencyBlockDiag& inv) {
  return [&g, &inv](const NodalField& v) {
    return apply_preconditioner(g, inv, v);
  };
}

// Centered square inclusion covering roughly a quarter of the cell edge.
MaterialMap square_inclusion_map(const GridLayout& g,
                                 const MaterialModel& matrix,
                                 const MaterialModel& inclusion) {
  MaterialMap map;
  map.catalog = {matrix, inclusion};
  map.phase.assign(static_cast<std::size_t>(g.num_pixels()), 0);
  const auto& dims = g.cell().dims;
  Index coords[3];
  for (Index p = 0; p < g.num_pixels(); ++p) {
    g.pixel_coords(p, coords);
    bool inside = true;
    for (int a = 0; a < g.dim(); ++a) {
      const Index n = dims[static_cast<std::size_t>(a)];
      if (coords[a] < 3 * n / 8 || coords[a] >= 5 * n / 8) inside = false;
    }
    if (inside) map.phase[static_cast<std::size_t>(p)] = 1;
  }
  return map;
}

}  // namespace

TEST_CASE("pcg converges in one iteration when A equals M") {
  auto gen = testing::rng(211);
  const GridLayout g =
      build_grid({{6, 5}, {1.0, 1.2}}, StencilKind::TwoTriangles);
  const Eigen::MatrixXd c_ref = mandel_identity(2);
  const TangentField t = TangentField::uniform(g.num_quads(), c_ref);
  const FrequencyBlockDiag inv =
      invert_blocks(assemble_reference(g, c_ref, 2));

  const QuadField s = testing::random_quad(g, 3, gen);
  NodalField b = divergence_apply(g, s);
  b.data = -b.data;

  const PcgOutcome out =
      pcg_solve(make_k(g, t), make_minv(g, inv), b, 1e-10, 50);
  CHECK(out.converged);
  CHECK(out.iterations == 1);
  CHECK(out.history.back() <= 1e-12 * out.history.front());
}

TEST_CASE("pcg returns immediately for a zero right-hand side") {
  const GridLayout g =
      build_grid({{4, 4}, {1.0, 1.0}}, StencilKind::TwoTriangles);
  const Eigen::MatrixXd c_ref = mandel_identity(2);
  const TangentField t = TangentField::uniform(g.num_quads(), c_ref);
  const FrequencyBlockDiag inv =
      invert_blocks(assemble_reference(g, c_ref, 2));
  NodalField b(2, g.num_nodes());
  const PcgOutcome out =
      pcg_solve(make_k(g, t), make_minv(g, inv), b, 1e-8, 50);
  CHECK(out.converged);
  CHECK(out.iterations == 0);
  CHECK(out.x.data.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pcg matches the dense fluctuation-space solve") {
  auto gen = testing::rng(223);
  const GridLayout g =
      build_grid({{3, 3}, {1.0, 1.0}}, StencilKind::TwoTriangles);
  const TangentField t = testing::two_phase_tangent(g, 3, gen);
  const Eigen::MatrixXd c_ref = volume_average_tangent(g, t);
  const FrequencyBlockDiag inv =
      invert_blocks(assemble_reference(g, c_ref, 2));

  const QuadField s = testing::random_quad(g, 3, gen);
  NodalField b = divergence_apply(g, s);
  b.data = -b.data;

  const PcgOutcome out =
      pcg_solve(make_k(g, t), make_minv(g, inv), b, 1e-10, 500);
  REQUIRE(out.converged);

  const Eigen::MatrixXd kd = testing::dense_operator(g, t, 2);
  const Eigen::VectorXd x_dense = testing::dense_pinv(kd) * b.data;
  CHECK((out.x.data - x_dense).cwiseAbs().maxCoeff() <
        1e-8 * x_dense.cwiseAbs().maxCoeff());
}

TEST_CASE("pcg error decreases monotonically in the A-norm") {
  auto gen = testing::rng(227);
  const GridLayout g =
      build_grid({{3, 4}, {1.0, 0.8}}, StencilKind::BilinearQuad);
  const TangentField t = testing::two_phase_tangent(g, 3, gen);
  const Eigen::MatrixXd c_ref = volume_average_tangent(g, t);
  const FrequencyBlockDiag inv =
      invert_blocks(assemble_reference(g, c_ref, 2));

  const QuadField s = testing::random_quad(g, 3, gen);
  NodalField b = divergence_apply(g, s);
  b.data = -b.data;

  const Eigen::MatrixXd kd = testing::dense_operator(g, t, 2);
  const Eigen::VectorXd x_star = testing::dense_pinv(kd) * b.data;

  std::vector<double> a_norm_errors;
  pcg_solve(make_k(g, t), make_minv(g, inv), b, 1e-12, 200,
            [&](const NodalField& xk) {
              const Eigen::VectorXd err = xk.data - x_star;
              a_norm_errors.push_back(std::sqrt(err.dot(kd * err)));
            });
  REQUIRE(a_norm_errors.size() > 3);
  for (std::size_t i = 1; i < a_norm_errors.size(); ++i) {
    CHECK(a_norm_errors[i] <= a_norm_errors[i - 1] * (1.0 + 1e-10));
  }
}

TEST_CASE("pcg aborts on an indefinite operator") {
  const GridLayout g =
      build_grid({{4, 4}, {1.0, 1.0}}, StencilKind::TwoTriangles);
  const Eigen::MatrixXd c_ref = mandel_identity(2);
  const FrequencyBlockDiag inv =
      invert_blocks(assemble_reference(g, c_ref, 2));
  auto gen = testing::rng(229);
  const QuadField s = testing::random_quad(g, 3, gen);
  NodalField b = divergence_apply(g, s);

  const LinearOperator negate = [](const NodalField& v) {
    NodalField out = v;
    out.data = -v.data;
    return out;
  };
  CHECK_THROWS_AS(pcg_solve(negate, make_minv(g, inv), b, 1e-8, 50),
                  NumericalError);
}

TEST_CASE("newton solves a linear problem in exactly one step") {
  for (const StencilKind kind :
       {StencilKind::TwoTriangles, StencilKind::BilinearQuad,
        StencilKind::FourTrianglesTwoNode}) {
    const GridLayout g = build_grid({{8, 8}, {1.0, 1.0}}, kind);
    MaterialMap map = square_inclusion_map(
        g, MaterialModel::isotropic_elastic(1.0, 0.5, 2),
        MaterialModel::isotropic_elastic(25.0, 14.0, 2));

    SolveConfig cfg;
    cfg.eta_newton = 1e-5;
    cfg.eta_cg = 1e-6;
    PrecondManager precond(ReferencePolicy::volume_mean(),
                           cfg.reassembly_threshold, 2);
    Eigen::VectorXd e(3);
    e << 1.0, -0.3, 0.4;
    const InternalState g0 = map.make_state(g);
    const NewtonOutcome out = newton_solve(g, map, g0, e, cfg, precond);

    CHECK(out.converged);
    CHECK(out.report.newton_steps() == 1);
    CHECK(out.report.cause == TerminationCause::Converged);
  }
}

TEST_CASE("uniform material carries no fluctuation") {
  const GridLayout g =
      build_grid({{6, 6}, {1.0, 1.0}}, StencilKind::BilinearQuad);
  const Eigen::MatrixXd c = isotropic_stiffness(1.3, 0.5, 2);
  MaterialMap map;
  map.catalog = {MaterialModel::linear_elastic(c)};
  map.phase.assign(static_cast<std::size_t>(g.num_pixels()), 0);

  SolveConfig cfg;
  PrecondManager precond(ReferencePolicy::volume_mean(),
                         cfg.reassembly_threshold, 2);
  Eigen::VectorXd e(3);
  e << 0.2, 0.0, 0.7;
  const NewtonOutcome out =
      newton_solve(g, map, map.make_state(g), e, cfg, precond);

  CHECK(out.converged);
  CHECK(out.report.newton_steps() == 1);
  CHECK(out.report.steps[0].cg_iterations == 0);
  CHECK(out.u.data.cwiseAbs().maxCoeff() < 1e-12);
  CHECK((out.average_stress - c * e).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("volume averages match a direct weighted sum") {
  auto gen = testing::rng(239);
  const GridLayout g =
      build_grid({{5, 4}, {1.1, 0.9}}, StencilKind::BilinearQuad);
  const QuadField s = testing::random_quad(g, 3, gen);
  Eigen::VectorXd direct = Eigen::VectorXd::Zero(3);
  for (Index q = 0; q < g.num_quads(); ++q) {
    direct += g.quad_weight(static_cast<int>(q % g.quads_per_pixel())) *
              s.vec(q);
  }
  direct /= g.cell().cell_volume();
  CHECK((average_stress(g, s) - direct).cwiseAbs().maxCoeff() < 1e-15);

  QuadField uniform(3, g.num_quads());
  for (Index q = 0; q < g.num_quads(); ++q) {
    uniform.at(q)[0] = 1.5;
    uniform.at(q)[2] = -0.25;
  }
  const Eigen::VectorXd avg = average_stress(g, uniform);
  CHECK(avg[0] == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(avg[1] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(avg[2] == doctest::Approx(-0.25).epsilon(1e-14));
}

TEST_CASE("periodic shifts of the microstructure shift the solution") {
  const GridLayout g =
      build_grid({{8, 8}, {1.0, 1.0}}, StencilKind::TwoTriangles);
  MaterialMap map = square_inclusion_map(
      g, MaterialModel::isotropic_elastic(1.0, 0.5, 2),
      MaterialModel::isotropic_elastic(40.0, 22.0, 2));

  const Index shift[2] = {3, 5};
  MaterialMap shifted = map;
  Index coords[3];
  for (Index p = 0; p < g.num_pixels(); ++p) {
    g.pixel_coords(p, coords);
    const Index src[2] = {coords[0] - shift[0], coords[1] - shift[1]};
    shifted.phase[static_cast<std::size_t>(p)] =
        map.phase[static_cast<std::size_t>(
            g.wrap_index(std::span<const Index>(src, 2)))];
  }

  SolveConfig cfg;
  cfg.eta_cg = 1e-9;
  Eigen::VectorXd e(3);
  e << 1.0, 0.0, 0.0;

  PrecondManager p1(ReferencePolicy::volume_mean(), cfg.reassembly_threshold,
                    2);
  PrecondManager p2(ReferencePolicy::volume_mean(), cfg.reassembly_threshold,
                    2);
  const NewtonOutcome a =
      newton_solve(g, map, map.make_state(g), e, cfg, p1);
  const NewtonOutcome b =
      newton_solve(g, shifted, shifted.make_state(g), e, cfg, p2);

  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK(a.report.newton_steps() == b.report.newton_steps());
  for (int i = 0; i < a.report.newton_steps(); ++i) {
    CHECK(a.report.steps[static_cast<std::size_t>(i)].cg_iterations ==
          b.report.steps[static_cast<std::size_t>(i)].cg_iterations);
  }

  // u_shifted(x) = u(x - shift), node type 0 everywhere here.
  const double scale = a.u.data.cwiseAbs().maxCoeff();
  for (Index p = 0; p < g.num_pixels(); ++p) {
    g.pixel_coords(p, coords);
    const Index src[2] = {coords[0] - shift[0], coords[1] - shift[1]};
    const Index ps = g.wrap_index(std::span<const Index>(src, 2));
    for (int k = 0; k < 2; ++k) {
      CHECK(std::abs(b.u(k, p) - a.u(k, ps)) < 1e-10 * scale);
    }
  }
}

TEST_CASE("pcg iteration counts stabilize under mesh refinement") {
  // Fixed two-phase geometry refined 8^2 -> 16^2 -> 32^2; volume-mean
  // reference. The counts at the two finest levels stay within 25%.
  SolveConfig cfg;
  cfg.eta_cg = 1e-6;
  Eigen::VectorXd e(3);
  e << 1.0, 0.0, 0.0;

  std::vector<int> iterations;
  std::vector<int> identity_iterations;
  for (const Index n : {Index(8), Index(16), Index(32)}) {
    const GridLayout g =
        build_grid({{n, n}, {1.0, 1.0}}, StencilKind::TwoTriangles);
    MaterialMap map = square_inclusion_map(
        g, MaterialModel::isotropic_elastic(1.0, 0.6, 2),
        MaterialModel::isotropic_elastic(100.0, 60.0, 2));

    PrecondManager mean(ReferencePolicy::volume_mean(),
                        cfg.reassembly_threshold, 2);
    const NewtonOutcome a =
        newton_solve(g, map, map.make_state(g), e, cfg, mean);
    REQUIRE(a.converged);
    iterations.push_back(a.report.steps[0].cg_iterations);

    PrecondManager ident(ReferencePolicy::identity_scaled(1.0),
                         cfg.reassembly_threshold, 2);
    const NewtonOutcome b =
        newton_solve(g, map, map.make_state(g), e, cfg, ident);
    REQUIRE(b.converged);
    identity_iterations.push_back(b.report.steps[0].cg_iterations);
  }

  const double fine = iterations[2], mid = iterations[1];
  CHECK(std::abs(fine - mid) / mid <= 0.25);
  // The volume-mean reference is at least as good as the identity.
  for (int level = 0; level < 3; ++level) {
    CHECK(iterations[static_cast<std::size_t>(level)] <=
          identity_iterations[static_cast<std::size_t>(level)]);
  }
}

TEST_CASE("volume-mean reference beats identity on the coated sphere") {
  SolveConfig cfg;
  cfg.eta_cg = 1e-6;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(6);
  e[0] = 1.0;
  const GridLayout g =
      build_grid({{16, 16, 16}, {1.0, 1.0, 1.0}}, StencilKind::TrilinearHex);

  for (double contrast : {1e-2, 1e2}) {
    const CoatedSphereModuli mod = coated_sphere_moduli(contrast);
    MaterialMap map;
    map.catalog = {
        MaterialModel::isotropic_elastic(mod.k_core, mod.g_core, 3),
        MaterialModel::isotropic_elastic(mod.k_coating, mod.g_coating, 3),
        MaterialModel::isotropic_elastic(mod.k_matrix, mod.g_matrix, 3)};
    map.phase = coated_sphere_phases(g.cell(), 0.2, 0.4);

    PrecondManager mean(ReferencePolicy::volume_mean(),
                        cfg.reassembly_threshold, 3);
    const NewtonOutcome a =
        newton_solve(g, map, map.make_state(g), e, cfg, mean);
    PrecondManager ident(ReferencePolicy::identity_scaled(1.0),
                         cfg.reassembly_threshold, 3);
    const NewtonOutcome b =
        newton_solve(g, map, map.make_state(g), e, cfg, ident);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(a.report.steps[0].cg_iterations <=
          b.report.steps[0].cg_iterations);
  }
}

TEST_CASE("newton reports the iteration cap") {
  const GridLayout g =
      build_grid({{8, 8}, {1.0, 1.0}}, StencilKind::TwoTriangles);
  MaterialMap map = square_inclusion_map(
      g, MaterialModel::j2_plastic(1.0, 0.5, 1e-4, 0.05, 2),
      MaterialModel::j2_plastic(10.0, 5.0, 2e-4, 0.5, 2));

  SolveConfig cfg;
  cfg.eta_newton = 1e-12;  // unreachable in one step
  cfg.max_newton = 1;
  PrecondManager precond(ReferencePolicy::volume_mean(),
                         cfg.reassembly_threshold, 2);
  Eigen::VectorXd e(3);
  e << 0.05, 0.0, 0.02;
  const NewtonOutcome out =
      newton_solve(g, map, map.make_state(g), e, cfg, precond);
  CHECK_FALSE(out.converged);
  CHECK(out.report.cause == TerminationCause::NewtonCap);
  CHECK(out.report.newton_steps() <= 1);
}

TEST_CASE("solver configuration is validated") {
  SolveConfig cfg;
  cfg.eta_newton = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = SolveConfig{};
  cfg.max_cg = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}
