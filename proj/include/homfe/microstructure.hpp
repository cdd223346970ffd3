#ifndef HOMFE_MICROSTRUCTURE_HPP
#define HOMFE_MICROSTRUCTURE_HPP

#include <cstdint>
#include <vector>

#include "homfe/grid.hpp"

namespace homfe {

/**
 * Built-in benchmark microstructures, assigned per pixel from the pixel
 * center position. Phase ids: templates document their own mapping.
 */

/// Coated sphere at the cell center (3d): 0 = core (radius r1),
/// 1 = coating (r1..r2), 2 = surrounding matrix.
std::vector<std::uint8_t> coated_sphere_phases(const CellSpec& cell, double r1,
                                               double r2);

/// Diamond-shaped (45 degree rotated square) inclusion at the cell center
/// (2d): 1 inside |x-c| + |y-c| <= half_diagonal, 0 outside.
std::vector<std::uint8_t> square_inclusion_phases(const CellSpec& cell,
                                                  double half_diagonal);

/// Independent per-pixel coin flips: 1 with probability `fraction`.
std::vector<std::uint8_t> random_two_phase(const CellSpec& cell,
                                           double fraction,
                                           std::uint64_t seed);

/**
 * Isotropic moduli of the three coated-sphere phases, balanced so that the
 * composite sphere is exactly neutral in the effective medium: core and
 * coating bulk moduli with K2/K1 = contrast, G = 0.6 K per phase, matrix
 * (K_eff, G_eff) = (1, 0.6). Radii r1 = 0.2, r2 = 0.4 on the unit cell.
 */
struct CoatedSphereModuli {
  double k_core, g_core;
  double k_coating, g_coating;
  double k_matrix, g_matrix;
};

CoatedSphereModuli coated_sphere_moduli(double contrast, double r1 = 0.2,
                                        double r2 = 0.4);

}  // namespace homfe

#endif
