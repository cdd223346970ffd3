#include "homfe/grid.hpp"

#include <cmath>

namespace homfe {

namespace {

Index floor_mod(Index a, Index n) {
  Index m = a % n;
  return m < 0 ? m + n : m;
}

}  // namespace

Index CellSpec::pixel_count() const {
  Index n = 1;
  for (Index d : dims) n *= d;
  return n;
}

double CellSpec::pixel_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= spacing(a);
  return v;
}

double CellSpec::cell_volume() const {
  double v = 1.0;
  for (double l : lengths) v *= l;
  return v;
}

void CellSpec::validate() const {
  if (dims.size() != lengths.size()) {
    throw ValidationError("cell: dims and lengths must have equal rank");
  }
  if (dim() != 2 && dim() != 3) {
    throw ValidationError("cell: dimension must be 2 or 3, got " +
                          std::to_string(dim()));
  }
  for (std::size_t a = 0; a < dims.size(); ++a) {
    if (dims[a] < 2) {
      throw ValidationError("cell.dims[" + std::to_string(a) +
                            "]: must be >= 2, got " + std::to_string(dims[a]));
    }
    if (!(lengths[a] > 0.0)) {
      throw ValidationError("cell.lengths[" + std::to_string(a) +
                            "]: must be > 0");
    }
  }
}

StencilKind stencil_kind_from_string(const std::string& name) {
  if (name == "bilinear-quad") return StencilKind::BilinearQuad;
  if (name == "two-triangles") return StencilKind::TwoTriangles;
  if (name == "four-triangles-two-node") return StencilKind::FourTrianglesTwoNode;
  if (name == "trilinear-hex") return StencilKind::TrilinearHex;
  throw ValidationError("stencil: unknown kind '" + name + "'");
}

std::string to_string(StencilKind kind) {
  switch (kind) {
    case StencilKind::BilinearQuad: return "bilinear-quad";
    case StencilKind::TwoTriangles: return "two-triangles";
    case StencilKind::FourTrianglesTwoNode: return "four-triangles-two-node";
    case StencilKind::TrilinearHex: return "trilinear-hex";
  }
  throw ValidationError("stencil: invalid kind");
}

namespace {

// Corner offsets in row-major axis order, node type 0.
const std::vector<std::array<Index, 3>> kQuadOffsets{
    {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
const std::vector<std::array<Index, 3>> kHexOffsets{
    {0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {0, 1, 1},
    {1, 0, 0}, {1, 0, 1}, {1, 1, 0}, {1, 1, 1}};

StencilSpec make_bilinear_quad(const CellSpec& cell) {
  const double h0 = cell.spacing(0), h1 = cell.spacing(1);
  const double vp = cell.pixel_volume();
  StencilSpec s;
  s.kind = StencilKind::BilinearQuad;
  s.dim = 2;
  s.nodes_per_pixel = 1;
  s.node_positions = {{0.0, 0.0, 0.0}};
  s.pixel_offsets = kQuadOffsets;

  const double g = 0.5 / std::sqrt(3.0);
  const double gp[2] = {0.5 - g, 0.5 + g};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      QuadPointSpec q;
      q.weight = vp / 4.0;
      q.position = {gp[i] * h0, gp[j] * h1, 0.0};
      const double x = gp[i], y = gp[j];
      // phi_ab = xi_a(x) eta_b(y), xi_0 = 1-x, xi_1 = x on the unit pixel.
      const double xi[2] = {1.0 - x, x}, dxi[2] = {-1.0 / h0, 1.0 / h0};
      const double et[2] = {1.0 - y, y}, det[2] = {-1.0 / h1, 1.0 / h1};
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          const int off = a + 2 * b;  // kQuadOffsets order
          q.entries.push_back({off, 0, {dxi[a] * et[b], xi[a] * det[b], 0.0}});
        }
      }
      s.quads.push_back(std::move(q));
    }
  }
  return s;
}

StencilSpec make_two_triangles(const CellSpec& cell) {
  const double h0 = cell.spacing(0), h1 = cell.spacing(1);
  const double vp = cell.pixel_volume();
  StencilSpec s;
  s.kind = StencilKind::TwoTriangles;
  s.dim = 2;
  s.nodes_per_pixel = 1;
  s.node_positions = {{0.0, 0.0, 0.0}};
  s.pixel_offsets = kQuadOffsets;  // (0,0) (1,0) (0,1) (1,1)

  // Lower triangle (0,0)-(h0,0)-(0,h1), centroid quadrature.
  {
    QuadPointSpec q;
    q.weight = vp / 2.0;
    q.position = {h0 / 3.0, h1 / 3.0, 0.0};
    q.entries = {{0, 0, {-1.0 / h0, -1.0 / h1, 0.0}},
                 {1, 0, {1.0 / h0, 0.0, 0.0}},
                 {2, 0, {0.0, 1.0 / h1, 0.0}}};
    s.quads.push_back(std::move(q));
  }
  // Upper triangle (h0,h1)-(0,h1)-(h0,0).
  {
    QuadPointSpec q;
    q.weight = vp / 2.0;
    q.position = {2.0 * h0 / 3.0, 2.0 * h1 / 3.0, 0.0};
    q.entries = {{3, 0, {1.0 / h0, 1.0 / h1, 0.0}},
                 {2, 0, {-1.0 / h0, 0.0, 0.0}},
                 {1, 0, {0.0, -1.0 / h1, 0.0}}};
    s.quads.push_back(std::move(q));
  }
  return s;
}

StencilSpec make_four_triangles_two_node(const CellSpec& cell) {
  const double h0 = cell.spacing(0), h1 = cell.spacing(1);
  const double vp = cell.pixel_volume();
  StencilSpec s;
  s.kind = StencilKind::FourTrianglesTwoNode;
  s.dim = 2;
  s.nodes_per_pixel = 2;
  s.node_positions = {{0.0, 0.0, 0.0}, {h0 / 2.0, h1 / 2.0, 0.0}};
  s.pixel_offsets = kQuadOffsets;

  // Four triangles fanned around the center node; one centroid point each.
  // Entries: two corner nodes (type 0 of neighboring pixels) + center (type 1).
  auto tri = [&](std::array<double, 3> centroid, StencilEntry a, StencilEntry b,
                 StencilEntry c) {
    QuadPointSpec q;
    q.weight = vp / 4.0;
    q.position = centroid;
    q.entries = {a, b, c};
    s.quads.push_back(std::move(q));
  };
  // bottom: (0,0), (h0,0), center
  tri({h0 / 2.0, h1 / 6.0, 0.0},
      {0, 0, {-1.0 / h0, -1.0 / h1, 0.0}},
      {1, 0, {1.0 / h0, -1.0 / h1, 0.0}},
      {0, 1, {0.0, 2.0 / h1, 0.0}});
  // right: (h0,0), (h0,h1), center
  tri({5.0 * h0 / 6.0, h1 / 2.0, 0.0},
      {1, 0, {1.0 / h0, -1.0 / h1, 0.0}},
      {3, 0, {1.0 / h0, 1.0 / h1, 0.0}},
      {0, 1, {-2.0 / h0, 0.0, 0.0}});
  // top: (h0,h1), (0,h1), center
  tri({h0 / 2.0, 5.0 * h1 / 6.0, 0.0},
      {3, 0, {1.0 / h0, 1.0 / h1, 0.0}},
      {2, 0, {-1.0 / h0, 1.0 / h1, 0.0}},
      {0, 1, {0.0, -2.0 / h1, 0.0}});
  // left: (0,h1), (0,0), center
  tri({h0 / 6.0, h1 / 2.0, 0.0},
      {2, 0, {-1.0 / h0, 1.0 / h1, 0.0}},
      {0, 0, {-1.0 / h0, -1.0 / h1, 0.0}},
      {0, 1, {2.0 / h0, 0.0, 0.0}});
  return s;
}

StencilSpec make_trilinear_hex(const CellSpec& cell) {
  const double h0 = cell.spacing(0), h1 = cell.spacing(1),
               h2 = cell.spacing(2);
  const double vp = cell.pixel_volume();
  StencilSpec s;
  s.kind = StencilKind::TrilinearHex;
  s.dim = 3;
  s.nodes_per_pixel = 1;
  s.node_positions = {{0.0, 0.0, 0.0}};
  s.pixel_offsets = kHexOffsets;

  const double g = 0.5 / std::sqrt(3.0);
  const double gp[2] = {0.5 - g, 0.5 + g};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        QuadPointSpec q;
        q.weight = vp / 8.0;
        q.position = {gp[i] * h0, gp[j] * h1, gp[k] * h2};
        const double x = gp[i], y = gp[j], z = gp[k];
        const double xi[2] = {1.0 - x, x}, dxi[2] = {-1.0 / h0, 1.0 / h0};
        const double et[2] = {1.0 - y, y}, det[2] = {-1.0 / h1, 1.0 / h1};
        const double ze[2] = {1.0 - z, z}, dze[2] = {-1.0 / h2, 1.0 / h2};
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            for (int c = 0; c < 2; ++c) {
              const int off = (a * 2 + b) * 2 + c;  // kHexOffsets order
              q.entries.push_back({off, 0,
                                   {dxi[a] * et[b] * ze[c],
                                    xi[a] * det[b] * ze[c],
                                    xi[a] * et[b] * dze[c]}});
            }
          }
        }
        s.quads.push_back(std::move(q));
      }
    }
  }
  return s;
}

StencilSpec make_stencil(const CellSpec& cell, StencilKind kind) {
  const int d = cell.dim();
  const int want = (kind == StencilKind::TrilinearHex) ? 3 : 2;
  if (d != want) {
    throw ValidationError("stencil: " + to_string(kind) + " requires a " +
                          std::to_string(want) + "d cell, got " +
                          std::to_string(d) + "d");
  }
  switch (kind) {
    case StencilKind::BilinearQuad: return make_bilinear_quad(cell);
    case StencilKind::TwoTriangles: return make_two_triangles(cell);
    case StencilKind::FourTrianglesTwoNode:
      return make_four_triangles_two_node(cell);
    case StencilKind::TrilinearHex: return make_trilinear_hex(cell);
  }
  throw ValidationError("stencil: invalid kind");
}

}  // namespace

GridLayout::GridLayout(CellSpec cell, StencilKind kind)
    : cell_(std::move(cell)) {
  cell_.validate();
  stencil_ = make_stencil(cell_, kind);
  init();
}

GridLayout::GridLayout(CellSpec cell, StencilSpec stencil)
    : cell_(std::move(cell)), stencil_(std::move(stencil)) {
  cell_.validate();
  if (stencil_.dim != cell_.dim()) {
    throw ValidationError("stencil: dimension mismatch with cell");
  }
  init();
}

void GridLayout::init() {
  num_pixels_ = cell_.pixel_count();
  const int d = dim();
  strides_ = {0, 0, 0};
  Index stride = 1;
  for (int a = d - 1; a >= 0; --a) {
    strides_[static_cast<std::size_t>(a)] = stride;
    stride *= cell_.dims[static_cast<std::size_t>(a)];
  }
}

Index GridLayout::wrap_index(std::span<const Index> coords,
                             std::span<const Index> offset) const {
  const int d = dim();
  Index flat = 0;
  for (int a = 0; a < d; ++a) {
    const Index off = a < static_cast<int>(offset.size()) ? offset[a] : 0;
    const Index c = floor_mod(coords[a] + off, cell_.dims[a]);
    flat += c * strides_[static_cast<std::size_t>(a)];
  }
  return flat;
}

Index GridLayout::wrap_index(std::span<const Index> coords) const {
  return wrap_index(coords, {});
}

void GridLayout::pixel_coords(Index flat, Index* coords) const {
  const int d = dim();
  for (int a = 0; a < d; ++a) {
    coords[a] = flat / strides_[static_cast<std::size_t>(a)];
    flat -= coords[a] * strides_[static_cast<std::size_t>(a)];
  }
}

Index GridLayout::pixel_flat(const Index* coords) const {
  Index flat = 0;
  for (int a = 0; a < dim(); ++a) {
    flat += coords[a] * strides_[static_cast<std::size_t>(a)];
  }
  return flat;
}

std::array<double, 3> GridLayout::node_position(Index node_flat) const {
  const int type = static_cast<int>(node_flat / num_pixels_);
  Index coords[3] = {0, 0, 0};
  pixel_coords(node_flat % num_pixels_, coords);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim(); ++a) {
    x[static_cast<std::size_t>(a)] =
        static_cast<double>(coords[a]) * cell_.spacing(a) +
        stencil_.node_positions[static_cast<std::size_t>(type)]
                               [static_cast<std::size_t>(a)];
  }
  return x;
}

bool GridLayout::equal_weights() const {
  const double w0 = stencil_.quads.front().weight;
  for (const auto& q : stencil_.quads) {
    if (std::abs(q.weight - w0) > 1e-12 * std::abs(w0)) return false;
  }
  return true;
}

GridLayout build_grid(const CellSpec& cell, StencilKind kind) {
  return GridLayout(cell, kind);
}

}  // namespace homfe
