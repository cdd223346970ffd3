#include "homfe/microstructure.hpp"

#include <cmath>
#include <random>

namespace homfe {

namespace {

void pixel_center(const CellSpec& cell, const Index* coords, double* x) {
  for (int a = 0; a < cell.dim(); ++a) {
    x[a] = (static_cast<double>(coords[a]) + 0.5) * cell.spacing(a);
  }
}

}  // namespace

std::vector<std::uint8_t> coated_sphere_phases(const CellSpec& cell, double r1,
                                               double r2) {
  cell.validate();
  if (cell.dim() != 3) {
    throw ValidationError("coated-sphere template requires a 3d cell");
  }
  if (!(0.0 < r1 && r1 < r2)) {
    throw ValidationError("coated-sphere template requires 0 < r1 < r2");
  }
  std::vector<std::uint8_t> phases(
      static_cast<std::size_t>(cell.pixel_count()));
  const double cx = 0.5 * cell.lengths[0];
  const double cy = 0.5 * cell.lengths[1];
  const double cz = 0.5 * cell.lengths[2];
  std::size_t i = 0;
  Index coords[3];
  double x[3];
  for (coords[0] = 0; coords[0] < cell.dims[0]; ++coords[0]) {
    for (coords[1] = 0; coords[1] < cell.dims[1]; ++coords[1]) {
      for (coords[2] = 0; coords[2] < cell.dims[2]; ++coords[2]) {
        pixel_center(cell, coords, x);
        const double r = std::sqrt((x[0] - cx) * (x[0] - cx) +
                                   (x[1] - cy) * (x[1] - cy) +
                                   (x[2] - cz) * (x[2] - cz));
        phases[i++] = r < r1 ? 0 : (r < r2 ? 1 : 2);
      }
    }
  }
  return phases;
}

std::vector<std::uint8_t> square_inclusion_phases(const CellSpec& cell,
                                                  double half_diagonal) {
  cell.validate();
  if (cell.dim() != 2) {
    throw ValidationError("square-inclusion template requires a 2d cell");
  }
  if (!(half_diagonal > 0.0)) {
    throw ValidationError("square-inclusion template requires a positive size");
  }
  std::vector<std::uint8_t> phases(
      static_cast<std::size_t>(cell.pixel_count()));
  const double cx = 0.5 * cell.lengths[0];
  const double cy = 0.5 * cell.lengths[1];
  std::size_t i = 0;
  Index coords[2];
  double x[2];
  for (coords[0] = 0; coords[0] < cell.dims[0]; ++coords[0]) {
    for (coords[1] = 0; coords[1] < cell.dims[1]; ++coords[1]) {
      pixel_center(cell, coords, x);
      const double d = std::abs(x[0] - cx) + std::abs(x[1] - cy);
      phases[i++] = d <= half_diagonal ? 1 : 0;
    }
  }
  return phases;
}

std::vector<std::uint8_t> random_two_phase(const CellSpec& cell,
                                           double fraction,
                                           std::uint64_t seed) {
  cell.validate();
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ValidationError("random template fraction must lie in [0,1]");
  }
  std::mt19937_64 gen(seed);
  std::vector<std::uint8_t> phases(
      static_cast<std::size_t>(cell.pixel_count()));
  for (auto& p : phases) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    p = u < fraction ? 1 : 0;
  }
  return phases;
}

CoatedSphereModuli coated_sphere_moduli(double contrast, double r1,
                                        double r2) {
  if (!(contrast > 0.0) || !(0.0 < r1 && r1 < r2)) {
    throw ValidationError("coated-sphere moduli: bad contrast or radii");
  }
  // Composite-sphere bulk modulus, G = 0.6 K in each phase:
  //   K_cs = K2 + f (K1 - K2) / (1 + (1 - f)(K1 - K2)/(K2 + 4 G2 / 3)),
  // with f the core fraction of the sphere. K2 = rho K1 makes K1 drop out
  // of the inner ratio, so K_cs = 1 solves in closed form.
  const double rho = contrast;
  const double f = std::pow(r1 / r2, 3);
  const double denom = 1.0 + (1.0 - f) * (1.0 - rho) / (1.8 * rho);
  const double k1 = 1.0 / (rho + f * (1.0 - rho) / denom);

  CoatedSphereModuli m;
  m.k_core = k1;
  m.k_coating = rho * k1;
  m.k_matrix = 1.0;
  m.g_core = 0.6 * m.k_core;
  m.g_coating = 0.6 * m.k_coating;
  m.g_matrix = 0.6;
  return m;
}

}  // namespace homfe
