#ifndef HOMFE_GRID_HPP
#define HOMFE_GRID_HPP

#include <array>
#include <span>
#include <string>
#include <vector>

#include "homfe/common.hpp"

namespace homfe {

/// Periodic rectangular cell: pixel counts and edge lengths per axis.
struct CellSpec {
  std::vector<Index> dims;      ///< N_1..N_d, each >= 2, d in {2,3}
  std::vector<double> lengths;  ///< l_1..l_d, each > 0

  int dim() const { return static_cast<int>(dims.size()); }
  Index pixel_count() const;
  double pixel_volume() const;
  double cell_volume() const;
  /// Pixel edge length along one axis.
  double spacing(int axis) const {
    return lengths[static_cast<std::size_t>(axis)] /
           static_cast<double>(dims[static_cast<std::size_t>(axis)]);
  }
  void validate() const;
};

enum class StencilKind {
  BilinearQuad,          ///< 2d, one node, one bilinear element, 4 Gauss points
  TwoTriangles,          ///< 2d, one node, two linear triangles, centroid rule
  FourTrianglesTwoNode,  ///< 2d, corner + center node, four linear triangles
  TrilinearHex,          ///< 3d, one node, one trilinear element, 8 Gauss points
};

StencilKind stencil_kind_from_string(const std::string& name);
std::string to_string(StencilKind kind);

/// Contribution of one node to one quadrature point of the stencil.
struct StencilEntry {
  int offset_index;             ///< into StencilSpec::pixel_offsets
  int node;                     ///< node type within the stencil
  std::array<double, 3> dphi;   ///< shape-function derivative at the point
};

struct QuadPointSpec {
  double weight;                    ///< w^Q, volume units
  std::array<double, 3> position;   ///< in-pixel coordinates, length units
  std::vector<StencilEntry> entries;
};

/// Per-pixel discretisation pattern: node types, elements collapsed into
/// quadrature points with precomputed shape-function derivatives.
struct StencilSpec {
  StencilKind kind;
  int dim;
  int nodes_per_pixel;
  std::vector<std::array<double, 3>> node_positions;  ///< in-pixel, length units
  std::vector<std::array<Index, 3>> pixel_offsets;    ///< distinct neighbor offsets
  std::vector<QuadPointSpec> quads;

  int quads_per_pixel() const { return static_cast<int>(quads.size()); }
};

/**
 * Periodic regular grid generated by repeating a discretisation stencil over
 * every pixel of the cell. Immutable after construction; flat indices follow
 * row-major pixel order with the last axis fastest.
 *
 * Node layout: node (pixel p, type n) has flat index n*N_p + p, so each node
 * type forms one contiguous scalar field over pixels. Quadrature points are
 * pixel-major: (pixel p, local q) -> p*quads_per_pixel + q.
 */
class GridLayout {
 public:
  GridLayout(CellSpec cell, StencilKind kind);

  /// Test hook: build a layout from a hand-made stencil table.
  GridLayout(CellSpec cell, StencilSpec stencil);

  const CellSpec& cell() const { return cell_; }
  const StencilSpec& stencil() const { return stencil_; }
  int dim() const { return cell_.dim(); }
  Index num_pixels() const { return num_pixels_; }
  Index num_nodes() const {
    return num_pixels_ * stencil_.nodes_per_pixel;
  }
  Index num_quads() const {
    return num_pixels_ * stencil_.quads_per_pixel();
  }
  int nodes_per_pixel() const { return stencil_.nodes_per_pixel; }
  int quads_per_pixel() const { return stencil_.quads_per_pixel(); }

  /// Flat index of a pixel given (unwrapped) coordinates plus an offset;
  /// coordinates are reduced modulo the grid dimensions.
  Index wrap_index(std::span<const Index> coords,
                   std::span<const Index> offset) const;
  Index wrap_index(std::span<const Index> coords) const;

  void pixel_coords(Index flat, Index* coords) const;
  Index pixel_flat(const Index* coords) const;

  Index node_index(Index pixel, int node_type) const {
    return static_cast<Index>(node_type) * num_pixels_ + pixel;
  }
  Index quad_index(Index pixel, int local_quad) const {
    return pixel * stencil_.quads_per_pixel() + local_quad;
  }

  /// Cell-frame position of a node (for affine test fields).
  std::array<double, 3> node_position(Index node_flat) const;

  double quad_weight(int local_quad) const {
    return stencil_.quads[static_cast<std::size_t>(local_quad)].weight;
  }
  /// All quadrature weights equal (holds for every built-in stencil)?
  bool equal_weights() const;

  const std::array<Index, 3>& strides() const { return strides_; }

 private:
  void init();

  CellSpec cell_;
  StencilSpec stencil_;
  Index num_pixels_ = 0;
  std::array<Index, 3> strides_{};  // row-major pixel strides
};

/// Build the layout for one of the built-in stencils; validates dimensions.
GridLayout build_grid(const CellSpec& cell, StencilKind kind);

}  // namespace homfe

#endif
