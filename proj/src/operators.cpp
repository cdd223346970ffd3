#include "homfe/operators.hpp"

#include <cmath>

#include "homfe/mandel.hpp"

namespace homfe {

namespace {

const double kHalfSqrt2 = std::sqrt(2.0) / 2.0;

// Gradient rows from one node contribution. Mechanics uses Mandel order
// (11, 22, 12) in 2d and (11, 22, 33, 23, 13, 12) in 3d with sqrt(2)-scaled
// shear rows; the scalar case is the plain gradient.
inline void accumulate_rows(int d, int c, const double* dphi, const double* uv,
                            double* g) {
  if (c == 1) {
    for (int a = 0; a < d; ++a) g[a] += dphi[a] * uv[0];
  } else if (d == 2) {
    g[0] += dphi[0] * uv[0];
    g[1] += dphi[1] * uv[1];
    g[2] += kHalfSqrt2 * (dphi[1] * uv[0] + dphi[0] * uv[1]);
  } else {
    g[0] += dphi[0] * uv[0];
    g[1] += dphi[1] * uv[1];
    g[2] += dphi[2] * uv[2];
    g[3] += kHalfSqrt2 * (dphi[2] * uv[1] + dphi[1] * uv[2]);
    g[4] += kHalfSqrt2 * (dphi[2] * uv[0] + dphi[0] * uv[2]);
    g[5] += kHalfSqrt2 * (dphi[1] * uv[0] + dphi[0] * uv[1]);
  }
}

// Adjoint of accumulate_rows: scatter a weighted quadrature value back to
// the node components.
inline void scatter_rows(int d, int c, const double* dphi, const double* s,
                         double w, double* out) {
  if (c == 1) {
    double acc = 0.0;
    for (int a = 0; a < d; ++a) acc += dphi[a] * s[a];
    out[0] += w * acc;
  } else if (d == 2) {
    out[0] += w * (dphi[0] * s[0] + kHalfSqrt2 * dphi[1] * s[2]);
    out[1] += w * (dphi[1] * s[1] + kHalfSqrt2 * dphi[0] * s[2]);
  } else {
    out[0] += w * (dphi[0] * s[0] +
                   kHalfSqrt2 * (dphi[2] * s[4] + dphi[1] * s[5]));
    out[1] += w * (dphi[1] * s[1] +
                   kHalfSqrt2 * (dphi[2] * s[3] + dphi[0] * s[5]));
    out[2] += w * (dphi[2] * s[2] +
                   kHalfSqrt2 * (dphi[1] * s[3] + dphi[0] * s[4]));
  }
}

struct PixelWalker {
  const GridLayout& layout;
  int d;
  Index coords[3] = {0, 0, 0};
  Index neighbors[8];

  explicit PixelWalker(const GridLayout& l) : layout(l), d(l.dim()) {}

  // Flat indices of the pixels reached by the stencil's distinct offsets
  // (offsets are all 0/1 per axis).
  void compute_neighbors() {
    const auto& dims = layout.cell().dims;
    const auto& strides = layout.strides();
    const auto& offsets = layout.stencil().pixel_offsets;
    Index cur[3], nxt[3];
    for (int a = 0; a < d; ++a) {
      cur[a] = coords[a] * strides[static_cast<std::size_t>(a)];
      const Index up = coords[a] + 1 == dims[static_cast<std::size_t>(a)]
                           ? 0
                           : coords[a] + 1;
      nxt[a] = up * strides[static_cast<std::size_t>(a)];
    }
    for (std::size_t o = 0; o < offsets.size(); ++o) {
      Index flat = 0;
      for (int a = 0; a < d; ++a) {
        flat += offsets[o][static_cast<std::size_t>(a)] ? nxt[a] : cur[a];
      }
      neighbors[o] = flat;
    }
  }

  void advance() {
    const auto& dims = layout.cell().dims;
    for (int a = d - 1; a >= 0; --a) {
      if (++coords[a] < dims[static_cast<std::size_t>(a)]) return;
      coords[a] = 0;
    }
  }
};

void check_nodal_shape(const GridLayout& layout, const NodalField& u) {
  const int d = layout.dim();
  if ((u.components != 1 && u.components != d) ||
      u.nodes != layout.num_nodes() ||
      u.data.size() != u.components * u.nodes) {
    throw ValidationError("nodal field shape does not match layout");
  }
}

void check_quad_shape(const GridLayout& layout, const QuadField& s) {
  const int d = layout.dim();
  if ((s.components != d && s.components != mandel_dim(d)) ||
      s.quads != layout.num_quads()) {
    throw ValidationError("quadrature field shape does not match layout");
  }
}

int node_components_for(const GridLayout& layout, const QuadField& s) {
  return s.components == layout.dim() ? 1 : layout.dim();
}

}  // namespace

int gradient_components(const GridLayout& layout, int node_components) {
  return node_components == 1 ? layout.dim() : mandel_dim(layout.dim());
}

QuadField gradient_apply(const GridLayout& layout, const NodalField& u) {
  check_nodal_shape(layout, u);
  const int d = layout.dim();
  const int c = u.components;
  const int m = gradient_components(layout, c);
  const Index np = layout.num_pixels();
  const auto& quads = layout.stencil().quads;
  const int nq = static_cast<int>(quads.size());

  QuadField out(m, layout.num_quads());
  PixelWalker walk(layout);
  double* og = out.data.data();
  for (Index p = 0; p < np; ++p) {
    walk.compute_neighbors();
    for (int lq = 0; lq < nq; ++lq) {
      double* g = og + (p * nq + lq) * m;
      for (const auto& e : quads[static_cast<std::size_t>(lq)].entries) {
        const Index node = static_cast<Index>(e.node) * np +
                           walk.neighbors[static_cast<std::size_t>(e.offset_index)];
        double uv[3];
        for (int k = 0; k < c; ++k) uv[k] = u(k, node);
        accumulate_rows(d, c, e.dphi.data(), uv, g);
      }
    }
    walk.advance();
  }
  return out;
}

NodalField divergence_apply(const GridLayout& layout, const QuadField& s,
                            bool weighted) {
  check_quad_shape(layout, s);
  const int d = layout.dim();
  const int c = node_components_for(layout, s);
  const int m = s.components;
  const Index np = layout.num_pixels();
  const auto& quads = layout.stencil().quads;
  const int nq = static_cast<int>(quads.size());

  NodalField out(c, layout.num_nodes());
  PixelWalker walk(layout);
  const double* sg = s.data.data();
  for (Index p = 0; p < np; ++p) {
    walk.compute_neighbors();
    for (int lq = 0; lq < nq; ++lq) {
      const auto& q = quads[static_cast<std::size_t>(lq)];
      const double w = weighted ? q.weight : 1.0;
      const double* sv = sg + (p * nq + lq) * m;
      for (const auto& e : q.entries) {
        const Index node = static_cast<Index>(e.node) * np +
                           walk.neighbors[static_cast<std::size_t>(e.offset_index)];
        double acc[3] = {0.0, 0.0, 0.0};
        scatter_rows(d, c, e.dphi.data(), sv, w, acc);
        for (int k = 0; k < c; ++k) out(k, node) += acc[k];
      }
    }
    walk.advance();
  }
  return out;
}

QuadField tangent_multiply(const TangentField& tangent, const QuadField& s) {
  if (tangent.m != s.components || tangent.quads != s.quads) {
    throw ValidationError("tangent_multiply: shape mismatch");
  }
  QuadField out(s.components, s.quads);
  for (Index q = 0; q < s.quads; ++q) {
    out.vec(q).noalias() = tangent.block(q) * s.vec(q);
  }
  return out;
}

namespace {

// Shared fused sweep: gradient -> per-point multiply -> weighted scatter.
template <class TangentAt>
NodalField fused_operator(const GridLayout& layout, const NodalField& u,
                          bool weighted, int m, TangentAt&& tangent_at) {
  check_nodal_shape(layout, u);
  const int d = layout.dim();
  const int c = u.components;
  if (m != gradient_components(layout, c)) {
    throw ValidationError("tangent dimension does not match layout");
  }
  const Index np = layout.num_pixels();
  const auto& quads = layout.stencil().quads;
  const int nq = static_cast<int>(quads.size());

  NodalField out(c, layout.num_nodes());
  PixelWalker walk(layout);
  double g[6], t[6];
  for (Index p = 0; p < np; ++p) {
    walk.compute_neighbors();
    for (int lq = 0; lq < nq; ++lq) {
      const auto& q = quads[static_cast<std::size_t>(lq)];
      for (int k = 0; k < m; ++k) g[k] = 0.0;
      for (const auto& e : q.entries) {
        const Index node = static_cast<Index>(e.node) * np +
                           walk.neighbors[static_cast<std::size_t>(e.offset_index)];
        double uv[3];
        for (int k = 0; k < c; ++k) uv[k] = u(k, node);
        accumulate_rows(d, c, e.dphi.data(), uv, g);
      }
      const double* cmat = tangent_at(p * nq + lq);  // column-major m x m
      for (int i = 0; i < m; ++i) {
        double acc = 0.0;
        for (int j = 0; j < m; ++j) acc += cmat[j * m + i] * g[j];
        t[i] = acc;
      }
      const double w = weighted ? q.weight : 1.0;
      for (const auto& e : q.entries) {
        const Index node = static_cast<Index>(e.node) * np +
                           walk.neighbors[static_cast<std::size_t>(e.offset_index)];
        double acc[3] = {0.0, 0.0, 0.0};
        scatter_rows(d, c, e.dphi.data(), t, w, acc);
        for (int k = 0; k < c; ++k) out(k, node) += acc[k];
      }
    }
    walk.advance();
  }
  return out;
}

}  // namespace

NodalField apply_tangent_operator(const GridLayout& layout,
                                  const TangentField& tangent,
                                  const NodalField& u, bool weighted) {
  if (tangent.quads != layout.num_quads()) {
    throw ValidationError("tangent field does not match layout");
  }
  const double* base = tangent.data.data();
  const int m = tangent.m;
  return fused_operator(layout, u, weighted, m,
                        [base, m](Index q) { return base + q * m * m; });
}

NodalField apply_reference_operator(const GridLayout& layout,
                                    const Eigen::MatrixXd& c_ref,
                                    const NodalField& u, bool weighted) {
  const double* base = c_ref.data();
  return fused_operator(layout, u, weighted, static_cast<int>(c_ref.rows()),
                        [base](Index) { return base; });
}

}  // namespace homfe
