#include "homfe/problem.hpp"

#include <fstream>

#include "homfe/io.hpp"
#include "homfe/mandel.hpp"
#include "homfe/microstructure.hpp"
#include "json.hpp"

namespace homfe {

using nlohmann::json;

int Problem::flux_components() const {
  return thermal ? cell.dim() : mandel_dim(cell.dim());
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ValidationError(field + ": " + what);
}

const json& require(const json& obj, const std::string& key,
                    const std::string& context) {
  if (!obj.contains(key)) {
    fail(context.empty() ? key : context + "." + key, "missing");
  }
  return obj.at(key);
}

double number_at(const json& obj, const std::string& key,
                 const std::string& context) {
  const json& v = require(obj, key, context);
  if (!v.is_number()) {
    fail(context + "." + key, "expected a number");
  }
  return v.get<double>();
}

Eigen::MatrixXd matrix_from(const json& v, const std::string& context) {
  if (!v.is_array() || v.empty() || !v.front().is_array()) {
    fail(context, "expected a matrix (array of rows)");
  }
  const std::size_t rows = v.size();
  const std::size_t cols = v.front().size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (v[i].size() != cols) fail(context, "ragged matrix rows");
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          v[i][j].get<double>();
    }
  }
  return m;
}

MaterialModel parse_material(const json& spec, int d,
                             const std::string& context) {
  const std::string model =
      require(spec, "model", context).get<std::string>();
  try {
    if (model == "conductivity-isotropic") {
      return MaterialModel::isotropic_conductivity(
          number_at(spec, "kappa", context), d);
    }
    if (model == "conductivity") {
      return MaterialModel::conductivity(
          matrix_from(require(spec, "matrix", context), context + ".matrix"));
    }
    if (model == "linear-elastic-isotropic") {
      return MaterialModel::isotropic_elastic(
          number_at(spec, "bulk", context), number_at(spec, "shear", context),
          d);
    }
    if (model == "linear-elastic") {
      return MaterialModel::linear_elastic(
          matrix_from(require(spec, "matrix", context), context + ".matrix"));
    }
    if (model == "j2-plastic") {
      return MaterialModel::j2_plastic(
          number_at(spec, "bulk", context), number_at(spec, "shear", context),
          number_at(spec, "yield_stress", context),
          spec.value("hardening", 0.0), d);
    }
  } catch (const ValidationError& err) {
    fail(context, err.what());
  }
  fail(context + ".model", "unknown model '" + model + "'");
}

std::vector<std::uint8_t> parse_microstructure(
    const json& spec, const CellSpec& cell,
    const std::filesystem::path& base_dir,
    std::optional<std::uint64_t> seed_override, std::uint64_t* seed_used) {
  const std::string type =
      require(spec, "type", "microstructure").get<std::string>();
  if (type == "raw") {
    const std::filesystem::path rel =
        require(spec, "path", "microstructure").get<std::string>();
    const std::filesystem::path path = rel.is_absolute() ? rel : base_dir / rel;
    return read_phase_map(path, cell.pixel_count());
  }
  if (type != "template") {
    fail("microstructure.type", "expected 'template' or 'raw'");
  }
  const std::string name =
      require(spec, "name", "microstructure").get<std::string>();
  if (name == "coated-sphere") {
    return coated_sphere_phases(cell, spec.value("r1", 0.2),
                                spec.value("r2", 0.4));
  }
  if (name == "square-inclusion") {
    const double fallback = 0.25 * cell.lengths.front();
    return square_inclusion_phases(cell,
                                   spec.value("half_diagonal", fallback));
  }
  if (name == "random-two-phase") {
    const std::uint64_t seed =
        seed_override.value_or(spec.value("seed", std::uint64_t{0}));
    *seed_used = seed;
    return random_two_phase(cell, spec.value("fraction", 0.5), seed);
  }
  fail("microstructure.name", "unknown template '" + name + "'");
}

}  // namespace

Problem parse_problem(const std::string& text,
                      const std::filesystem::path& base_dir,
                      std::optional<std::uint64_t> seed_override) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ValidationError(std::string("problem file: ") + err.what());
  }

  Problem p;

  const json& cell = require(doc, "cell", "");
  for (const auto& v : require(cell, "dims", "cell")) {
    p.cell.dims.push_back(v.get<Index>());
  }
  for (const auto& v : require(cell, "lengths", "cell")) {
    p.cell.lengths.push_back(v.get<double>());
  }
  p.cell.validate();
  const int d = p.cell.dim();

  p.stencil =
      stencil_kind_from_string(require(doc, "stencil", "").get<std::string>());

  const std::string physics = require(doc, "physics", "").get<std::string>();
  if (physics == "thermal") {
    p.thermal = true;
  } else if (physics == "elasticity") {
    p.thermal = false;
  } else {
    fail("physics", "expected 'elasticity' or 'thermal'");
  }

  p.phases = parse_microstructure(require(doc, "microstructure", ""), p.cell,
                                  base_dir, seed_override, &p.seed);

  const json& materials = require(doc, "materials", "");
  if (!materials.is_object() || materials.empty()) {
    fail("materials", "expected a non-empty object keyed by phase id");
  }
  int max_id = -1;
  for (const auto& [key, value] : materials.items()) {
    (void)value;
    int id = -1;
    try {
      id = std::stoi(key);
    } catch (...) {
      fail("materials", "phase key '" + key + "' is not an integer");
    }
    if (id < 0 || id > 255) fail("materials", "phase id out of range");
    max_id = std::max(max_id, id);
  }
  p.catalog.reserve(static_cast<std::size_t>(max_id) + 1);
  for (int id = 0; id <= max_id; ++id) {
    const std::string key = std::to_string(id);
    if (!materials.contains(key)) {
      fail("materials", "phase ids must be contiguous, missing '" + key + "'");
    }
    MaterialModel model =
        parse_material(materials.at(key), d, "materials." + key);
    if (model.thermal() != p.thermal) {
      fail("materials." + key, "model does not match the declared physics");
    }
    p.catalog.push_back(std::move(model));
  }
  for (std::size_t i = 0; i < p.phases.size(); ++i) {
    if (p.phases[i] > max_id) {
      fail("materials", "phase id " + std::to_string(int(p.phases[i])) +
                            " at pixel " + std::to_string(i) +
                            " missing from catalog");
    }
  }

  const int m = p.flux_components();
  if (doc.contains("reference")) {
    const json& ref = doc.at("reference");
    const std::string policy =
        require(ref, "policy", "reference").get<std::string>();
    if (policy == "volume-mean") {
      p.reference = ReferencePolicy::volume_mean();
    } else if (policy == "identity-scaled") {
      p.reference = ReferencePolicy::identity_scaled(ref.value("scale", 1.0));
    } else if (policy == "explicit") {
      p.reference = ReferencePolicy::explicit_matrix(matrix_from(
          require(ref, "matrix", "reference"), "reference.matrix"));
      if (p.reference.matrix.rows() != m) {
        fail("reference.matrix", "expected " + std::to_string(m) + " rows");
      }
    } else {
      fail("reference.policy", "unknown policy '" + policy + "'");
    }
  }

  const json& loading = require(doc, "loading", "");
  if (!loading.is_array() || loading.empty()) {
    fail("loading", "expected a non-empty array of load vectors");
  }
  for (std::size_t i = 0; i < loading.size(); ++i) {
    const json& step = loading[i];
    if (!step.is_array() || static_cast<int>(step.size()) != m) {
      fail("loading[" + std::to_string(i) + "]",
           "expected " + std::to_string(m) + " components, got " +
               std::to_string(step.size()));
    }
    Eigen::VectorXd e(m);
    for (int k = 0; k < m; ++k) e[k] = step[static_cast<std::size_t>(k)];
    p.loading.push_back(std::move(e));
  }

  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    p.solver.eta_newton = s.value("eta_newton", p.solver.eta_newton);
    p.solver.eta_cg = s.value("eta_cg", p.solver.eta_cg);
    p.solver.max_newton = s.value("max_newton", p.solver.max_newton);
    p.solver.max_cg = s.value("max_cg", p.solver.max_cg);
    p.solver.reassembly_threshold =
        s.value("reassembly_threshold", p.solver.reassembly_threshold);
    const std::string crit =
        s.value("newton_criterion", std::string("strain-increment"));
    if (crit == "strain-increment") {
      p.solver.criterion = SolveConfig::NewtonCriterion::StrainIncrement;
    } else if (crit == "displacement-increment") {
      p.solver.criterion = SolveConfig::NewtonCriterion::DisplacementIncrement;
    } else {
      fail("solver.newton_criterion", "unknown criterion '" + crit + "'");
    }
    p.solver.validate();
  }

  return p;
}

Problem load_problem(const std::filesystem::path& path,
                     std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("problem file: cannot open '" + path.string() +
                          "'");
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_problem(text, path.parent_path(), seed_override);
}

}  // namespace homfe
