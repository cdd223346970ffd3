#include <cmath>

#include "doctest.h"
#include "homfe/mandel.hpp"
#include "support/oracles.hpp"

using namespace homfe;

TEST_CASE("mandel vector of a diagonal tensor") {
  Eigen::MatrixXd e(2, 2);
  e << 1.0, 0.0, 0.0, 0.0;
  const Eigen::VectorXd v = to_mandel(e);
  CHECK(v[0] == 1.0);
  CHECK(v[1] == 0.0);
  CHECK(v[2] == 0.0);
}

TEST_CASE("mandel shear entry carries sqrt(2)") {
  const double a = 0.37;
  Eigen::MatrixXd e(2, 2);
  e << 0.0, a, a, 0.0;
  const Eigen::VectorXd v = to_mandel(e);
  CHECK(v[2] == doctest::Approx(std::sqrt(2.0) * a).epsilon(1e-15));
}

TEST_CASE("mandel norm equals Frobenius norm") {
  auto gen = testing::rng(42);
  for (int d : {2, 3}) {
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::MatrixXd e = testing::random_symmetric(d, gen);
      const Eigen::VectorXd v = to_mandel(e);
      CHECK(v.norm() == doctest::Approx(e.norm()).epsilon(1e-14));
      CHECK((from_mandel(v) - e).cwiseAbs().maxCoeff() < 1e-15);
    }
  }
}

TEST_CASE("mandel dot product equals double contraction") {
  auto gen = testing::rng(7);
  for (int d : {2, 3}) {
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::MatrixXd a = testing::random_symmetric(d, gen);
      const Eigen::MatrixXd b = testing::random_symmetric(d, gen);
      const double contraction = (a.transpose() * b).trace();
      CHECK(to_mandel(a).dot(to_mandel(b)) ==
            doctest::Approx(contraction).epsilon(1e-13));
    }
  }
}

TEST_CASE("isotropic stiffness special values") {
  // 3K = 2G = 1 gives the identity.
  const Eigen::MatrixXd c_id = isotropic_stiffness(1.0 / 3.0, 0.5, 3);
  CHECK((c_id - mandel_identity(3)).cwiseAbs().maxCoeff() < 1e-15);

  const Eigen::MatrixXd c = isotropic_stiffness(1.0, 0.6, 3);
  CHECK(c(0, 0) == doctest::Approx(1.8).epsilon(1e-15));  // K + 4G/3

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
  const auto& lam = eig.eigenvalues();
  // Spectrum {3K} + {2G} with multiplicity d_m - 1.
  CHECK(lam[5] == doctest::Approx(3.0).epsilon(1e-13));
  for (int i = 0; i < 5; ++i) {
    CHECK(lam[i] == doctest::Approx(1.2).epsilon(1e-13));
  }
}

TEST_CASE("plane strain restriction of the 3d stiffness") {
  const Eigen::MatrixXd c3 = isotropic_stiffness(1.7, 0.4, 3);
  const Eigen::MatrixXd c2 = isotropic_stiffness(1.7, 0.4, 2);
  const int idx[3] = {0, 1, 5};
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      CHECK(c2(a, b) == c3(idx[a], idx[b]));
    }
  }
}

TEST_CASE("isotropic stiffness rejects non-positive moduli") {
  CHECK_THROWS_AS(isotropic_stiffness(0.0, 1.0, 3), ValidationError);
  CHECK_THROWS_AS(isotropic_stiffness(1.0, -0.1, 2), ValidationError);
}

namespace {

// Random fourth-order tensor with minor and major symmetries.
std::vector<double> random_sym_tensor4(int d, std::mt19937_64& gen) {
  std::vector<double> c(static_cast<std::size_t>(d * d * d * d));
  auto at = [&](int i, int j, int k, int l) -> double& {
    return c[static_cast<std::size_t>(((i * d + j) * d + k) * d + l)];
  };
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        for (int l = k; l < d; ++l) {
          const double v = testing::uniform(gen);
          at(i, j, k, l) = at(j, i, k, l) = at(i, j, l, k) = at(j, i, l, k) = v;
          at(k, l, i, j) = at(l, k, i, j) = at(k, l, j, i) = at(l, k, j, i) = v;
        }
      }
    }
  }
  return c;
}

}  // namespace

TEST_CASE("mandel stiffness is symmetric and preserves the contraction") {
  auto gen = testing::rng(11);
  for (int d : {2, 3}) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto c4 = random_sym_tensor4(d, gen);
      const Eigen::MatrixXd m = to_mandel_stiffness(c4, d);
      CHECK((m - m.transpose()).cwiseAbs().maxCoeff() < 1e-14);

      const Eigen::MatrixXd e = testing::random_symmetric(d, gen);
      // Tensor contraction (C : E)_ij.
      Eigen::MatrixXd ce = Eigen::MatrixXd::Zero(d, d);
      auto at = [&](int i, int j, int k, int l) {
        return c4[static_cast<std::size_t>(((i * d + j) * d + k) * d + l)];
      };
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          for (int k = 0; k < d; ++k) {
            for (int l = 0; l < d; ++l) {
              ce(i, j) += at(i, j, k, l) * e(k, l);
            }
          }
        }
      }
      const Eigen::VectorXd lhs = m * to_mandel(e);
      const Eigen::VectorXd rhs = to_mandel(ce);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
    }
  }
}
