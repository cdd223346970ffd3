#include <cmath>

#include "doctest.h"
#include "homfe/microstructure.hpp"

using namespace homfe;

TEST_CASE("balanced coated-sphere moduli at contrast 1e3") {
  const CoatedSphereModuli m = coated_sphere_moduli(1e3);
  CHECK(m.k_core == doctest::Approx(0.00132060).epsilon(1e-5));
  CHECK(m.k_coating == doctest::Approx(1.3206033).epsilon(1e-5));
  CHECK(m.g_core == doctest::Approx(0.00079236).epsilon(1e-5));
  CHECK(m.g_coating == doctest::Approx(0.7923620).epsilon(1e-5));
  CHECK(m.k_matrix == 1.0);
  CHECK(m.g_matrix == 0.6);
}

TEST_CASE("balanced moduli solve the composite-sphere identity") {
  // K_cs(K1, K2) must equal the matrix bulk modulus for any contrast.
  for (double contrast : {1e-2, 0.5, 2.0, 1e2, 1e3}) {
    const CoatedSphereModuli m = coated_sphere_moduli(contrast);
    const double f = std::pow(0.2 / 0.4, 3);
    const double denom =
        1.0 + (1.0 - f) * (m.k_core - m.k_coating) /
                  (m.k_coating + 4.0 * m.g_coating / 3.0);
    const double k_cs =
        m.k_coating + f * (m.k_core - m.k_coating) / denom;
    CHECK(k_cs == doctest::Approx(m.k_matrix).epsilon(1e-12));
    CHECK(m.k_coating / m.k_core == doctest::Approx(contrast).epsilon(1e-12));
  }
}

TEST_CASE("coated-sphere template phases") {
  const CellSpec cell{{16, 16, 16}, {1.0, 1.0, 1.0}};
  const auto phases = coated_sphere_phases(cell, 0.2, 0.4);
  Index counts[3] = {0, 0, 0};
  for (auto p : phases) ++counts[p];
  const double vol = static_cast<double>(cell.pixel_count());
  // Voxelized volumes approach the analytic ball volumes.
  CHECK(counts[0] / vol ==
        doctest::Approx(4.0 / 3.0 * M_PI * 0.2 * 0.2 * 0.2).epsilon(0.2));
  CHECK((counts[0] + counts[1]) / vol ==
        doctest::Approx(4.0 / 3.0 * M_PI * 0.4 * 0.4 * 0.4).epsilon(0.1));
  CHECK_THROWS_AS(coated_sphere_phases(cell, 0.4, 0.2), ValidationError);
  CHECK_THROWS_AS(coated_sphere_phases({{8, 8}, {1.0, 1.0}}, 0.2, 0.4),
                  ValidationError);
}

TEST_CASE("square-inclusion template is a centered diamond") {
  const CellSpec cell{{64, 64}, {1.0, 1.0}};
  const auto phases = square_inclusion_phases(cell, 0.25);
  Index count = 0;
  for (auto p : phases) count += p;
  const double fraction =
      static_cast<double>(count) / static_cast<double>(cell.pixel_count());
  CHECK(fraction == doctest::Approx(2.0 * 0.25 * 0.25).epsilon(0.05));
  // Center pixel inside, corner pixel outside.
  CHECK(phases[32 * 64 + 32] == 1);
  CHECK(phases[0] == 0);
}

TEST_CASE("random template is seeded and matches its fraction") {
  const CellSpec cell{{64, 64}, {1.0, 1.0}};
  const auto a = random_two_phase(cell, 0.3, 1234);
  const auto b = random_two_phase(cell, 0.3, 1234);
  const auto c = random_two_phase(cell, 0.3, 99);
  CHECK(a == b);
  CHECK(a != c);
  Index count = 0;
  for (auto p : a) count += p;
  CHECK(static_cast<double>(count) / static_cast<double>(a.size()) ==
        doctest::Approx(0.3).epsilon(0.15));
}
