#ifndef HOMFE_FIELDS_HPP
#define HOMFE_FIELDS_HPP

#include <Eigen/Dense>

#include "homfe/common.hpp"
#include "homfe/grid.hpp"

namespace homfe {

/**
 * Per-node field (displacement, temperature, residual). Storage is planar:
 * all nodes of component 0, then component 1, ... so that each
 * (component, node type) pair is one contiguous scalar field over pixels.
 */
struct NodalField {
  int components = 0;
  Index nodes = 0;
  Eigen::VectorXd data;

  NodalField() = default;
  NodalField(int components_, Index nodes_)
      : components(components_), nodes(nodes_),
        data(Eigen::VectorXd::Zero(components_ * nodes_)) {}

  double& operator()(int c, Index node) { return data[c * nodes + node]; }
  double operator()(int c, Index node) const { return data[c * nodes + node]; }

  double* component(int c) { return data.data() + c * nodes; }
  const double* component(int c) const { return data.data() + c * nodes; }

  Index size() const { return data.size(); }

  /// Subtract the per-component mean (projection onto the fluctuation space).
  void remove_component_means();
};

/// Per-quadrature-point field (strain, stress, gradient, flux), with the
/// `components` values of one point stored contiguously.
struct QuadField {
  int components = 0;
  Index quads = 0;
  Eigen::VectorXd data;

  QuadField() = default;
  QuadField(int components_, Index quads_)
      : components(components_), quads(quads_),
        data(Eigen::VectorXd::Zero(components_ * quads_)) {}

  double* at(Index q) { return data.data() + q * components; }
  const double* at(Index q) const { return data.data() + q * components; }

  Eigen::Map<Eigen::VectorXd> vec(Index q) {
    return {at(q), components};
  }
  Eigen::Map<const Eigen::VectorXd> vec(Index q) const {
    return {at(q), components};
  }

  Index size() const { return data.size(); }
};

/// Per-quadrature-point constitutive tangent matrices (column-major blocks).
struct TangentField {
  int m = 0;
  Index quads = 0;
  bool pixel_constant = false;  ///< hint: constant within each pixel
  Eigen::VectorXd data;

  TangentField() = default;
  TangentField(int m_, Index quads_)
      : m(m_), quads(quads_), data(Eigen::VectorXd::Zero(m_ * m_ * quads_)) {}

  static TangentField uniform(Index quads, const Eigen::MatrixXd& c);

  Eigen::Map<Eigen::MatrixXd> block(Index q) {
    return {data.data() + q * m * m, m, m};
  }
  Eigen::Map<const Eigen::MatrixXd> block(Index q) const {
    return {data.data() + q * m * m, m, m};
  }
};

/// W-weighted inner product of two quadrature fields,
/// sum_Q w^Q a(Q).b(Q).
double weighted_dot(const GridLayout& layout, const QuadField& a,
                    const QuadField& b);

/// W-weighted norm, sqrt(weighted_dot(a, a)).
double weighted_norm(const GridLayout& layout, const QuadField& a);

/// Volume average (1/|Y|) sum_Q w^Q s(Q) of a quadrature field.
Eigen::VectorXd volume_average(const GridLayout& layout, const QuadField& s);

/// Volume average of the per-quadrature-point tangent matrices.
Eigen::MatrixXd volume_average_tangent(const GridLayout& layout,
                                       const TangentField& t);

}  // namespace homfe

#endif
