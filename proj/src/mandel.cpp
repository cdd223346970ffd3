#include "homfe/mandel.hpp"

#include <cmath>

namespace homfe {

namespace {

const double kSqrt2 = std::sqrt(2.0);

void check_dim(int d) {
  if (d != 2 && d != 3) {
    throw ValidationError("mandel: dimension must be 2 or 3, got " +
                          std::to_string(d));
  }
}

}  // namespace

int mandel_dim(int d) {
  check_dim(d);
  return d * (d + 1) / 2;
}

const std::vector<std::pair<int, int>>& mandel_pairs(int d) {
  check_dim(d);
  static const std::vector<std::pair<int, int>> pairs2{{0, 0}, {1, 1}, {0, 1}};
  static const std::vector<std::pair<int, int>> pairs3{
      {0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};
  return d == 2 ? pairs2 : pairs3;
}

Eigen::VectorXd to_mandel(const Eigen::MatrixXd& tensor) {
  const int d = static_cast<int>(tensor.rows());
  check_dim(d);
  if (tensor.cols() != d) {
    throw ValidationError("to_mandel: tensor must be square");
  }
  const Eigen::MatrixXd sym = 0.5 * (tensor + tensor.transpose());
  const auto& pairs = mandel_pairs(d);
  Eigen::VectorXd v(mandel_dim(d));
  for (int a = 0; a < v.size(); ++a) {
    const auto [i, j] = pairs[a];
    v[a] = (i == j ? sym(i, j) : kSqrt2 * sym(i, j));
  }
  return v;
}

Eigen::MatrixXd from_mandel(const Eigen::VectorXd& v) {
  int d = 0;
  if (v.size() == 3) {
    d = 2;
  } else if (v.size() == 6) {
    d = 3;
  } else {
    throw ValidationError("from_mandel: vector length must be 3 or 6");
  }
  const auto& pairs = mandel_pairs(d);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(d, d);
  for (int a = 0; a < v.size(); ++a) {
    const auto [i, j] = pairs[a];
    if (i == j) {
      t(i, j) = v[a];
    } else {
      t(i, j) = t(j, i) = v[a] / kSqrt2;
    }
  }
  return t;
}

Eigen::MatrixXd to_mandel_stiffness(const std::vector<double>& c, int d) {
  check_dim(d);
  const std::size_t expected = static_cast<std::size_t>(d) * d * d * d;
  if (c.size() != expected) {
    throw ValidationError("to_mandel_stiffness: expected d^4 entries");
  }
  const auto& pairs = mandel_pairs(d);
  const int m = mandel_dim(d);
  auto at = [&](int i, int j, int k, int l) {
    return c[static_cast<std::size_t>(((i * d + j) * d + k) * d + l)];
  };
  Eigen::MatrixXd out(m, m);
  for (int a = 0; a < m; ++a) {
    const auto [i, j] = pairs[a];
    const double sa = (i == j) ? 1.0 : kSqrt2;
    for (int b = 0; b < m; ++b) {
      const auto [k, l] = pairs[b];
      const double sb = (k == l) ? 1.0 : kSqrt2;
      out(a, b) = sa * sb * at(i, j, k, l);
    }
  }
  return out;
}

Eigen::MatrixXd mandel_identity(int d) {
  return Eigen::MatrixXd::Identity(mandel_dim(d), mandel_dim(d));
}

Eigen::VectorXd mandel_trace_vector(int d) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(mandel_dim(d));
  m.head(d).setOnes();
  return m;
}

Eigen::MatrixXd volumetric_projector(int d) {
  const Eigen::VectorXd m = mandel_trace_vector(d);
  return m * m.transpose() / static_cast<double>(d);
}

Eigen::MatrixXd deviatoric_projector(int d) {
  return mandel_identity(d) - volumetric_projector(d);
}

Eigen::MatrixXd isotropic_stiffness(double bulk_modulus, double shear_modulus,
                                    int d) {
  check_dim(d);
  if (!(bulk_modulus > 0.0) || !(shear_modulus > 0.0)) {
    throw ValidationError("isotropic_stiffness: moduli must be positive");
  }
  const Eigen::MatrixXd c3 = 3.0 * bulk_modulus * volumetric_projector(3) +
                             2.0 * shear_modulus * deviatoric_projector(3);
  if (d == 3) {
    return c3;
  }
  // Plane strain: in-plane components (11, 22, 12) of the 3d matrix.
  const int idx[3] = {0, 1, 5};
  Eigen::MatrixXd c2(3, 3);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      c2(a, b) = c3(idx[a], idx[b]);
    }
  }
  return c2;
}

}  // namespace homfe
