#include "homfe/fields.hpp"

namespace homfe {

void NodalField::remove_component_means() {
  for (int c = 0; c < components; ++c) {
    Eigen::Map<Eigen::VectorXd> slice(component(c), nodes);
    slice.array() -= slice.mean();
  }
}

TangentField TangentField::uniform(Index quads, const Eigen::MatrixXd& c) {
  TangentField t(static_cast<int>(c.rows()), quads);
  t.pixel_constant = true;
  for (Index q = 0; q < quads; ++q) t.block(q) = c;
  return t;
}

double weighted_dot(const GridLayout& layout, const QuadField& a,
                    const QuadField& b) {
  if (a.components != b.components || a.quads != b.quads) {
    throw ValidationError("weighted_dot: shape mismatch");
  }
  const int nq = layout.quads_per_pixel();
  const int m = a.components;
  double acc = 0.0;
  for (Index q = 0; q < a.quads; ++q) {
    const double w = layout.quad_weight(static_cast<int>(q % nq));
    double s = 0.0;
    const double* pa = a.at(q);
    const double* pb = b.at(q);
    for (int k = 0; k < m; ++k) s += pa[k] * pb[k];
    acc += w * s;
  }
  return acc;
}

double weighted_norm(const GridLayout& layout, const QuadField& a) {
  return std::sqrt(weighted_dot(layout, a, a));
}

Eigen::VectorXd volume_average(const GridLayout& layout, const QuadField& s) {
  const int nq = layout.quads_per_pixel();
  Eigen::VectorXd avg = Eigen::VectorXd::Zero(s.components);
  for (Index q = 0; q < s.quads; ++q) {
    const double w = layout.quad_weight(static_cast<int>(q % nq));
    avg += w * s.vec(q);
  }
  return avg / layout.cell().cell_volume();
}

Eigen::MatrixXd volume_average_tangent(const GridLayout& layout,
                                       const TangentField& t) {
  const int nq = layout.quads_per_pixel();
  Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(t.m, t.m);
  for (Index q = 0; q < t.quads; ++q) {
    const double w = layout.quad_weight(static_cast<int>(q % nq));
    avg += w * t.block(q);
  }
  return avg / layout.cell().cell_volume();
}

}  // namespace homfe
