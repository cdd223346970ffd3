#ifndef HOMFE_PROBLEM_HPP
#define HOMFE_PROBLEM_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "homfe/grid.hpp"
#include "homfe/material.hpp"
#include "homfe/solver.hpp"

namespace homfe {

/**
 * A homogenization problem as described by a problem file: cell geometry,
 * stencil, physics, phase map, material catalog, reference-material policy,
 * load program and solver settings.
 *
 * Problem files are JSON documents; see README for the schema. Phase maps
 * come either from a built-in template (coated-sphere, square-inclusion,
 * random-two-phase) or from a headerless row-major uint8 raw file.
 */
struct Problem {
  CellSpec cell;
  StencilKind stencil = StencilKind::TwoTriangles;
  bool thermal = false;
  std::vector<std::uint8_t> phases;
  std::vector<MaterialModel> catalog;
  ReferencePolicy reference = ReferencePolicy::volume_mean();
  std::vector<Eigen::VectorXd> loading;
  SolveConfig solver;
  std::uint64_t seed = 0;  ///< effective seed of randomized templates

  GridLayout layout() const { return GridLayout(cell, stencil); }
  MaterialMap material_map() const { return MaterialMap{catalog, phases}; }
  int node_components() const { return thermal ? 1 : cell.dim(); }
  int flux_components() const;
};

/// Parse and validate a problem file. Throws ValidationError with the
/// offending field named. `seed_override` replaces the seed of randomized
/// templates.
Problem load_problem(const std::filesystem::path& path,
                     std::optional<std::uint64_t> seed_override = {});

/// Same, from a JSON string (paths inside resolve against base_dir).
Problem parse_problem(const std::string& text,
                      const std::filesystem::path& base_dir,
                      std::optional<std::uint64_t> seed_override = {});

}  // namespace homfe

#endif
