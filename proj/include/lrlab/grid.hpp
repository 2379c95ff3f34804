#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "lrlab/geometry.hpp"

namespace lrlab {

/// Uniform tensor grid on Q = (0, T) x box. Axis 0 is time; axes 1..n are spatial.
/// Samples are stored row-major in (t, x_1, ..., x_n) order.
class SpacetimeGrid {
 public:
  SpacetimeGrid() = default;
  SpacetimeGrid(int n_spatial, double T, std::array<double, 3> box_lo, std::array<double, 3> box_hi,
                int n_t, std::array<int, 3> n_x);

  /// Cube [lo, hi]^n with the same sample count per spatial axis.
  static SpacetimeGrid cube(int n_spatial, double T, double lo, double hi, int n_t, int n_x);

  int n_spatial() const { return n_spatial_; }
  int dim() const { return n_spatial_ + 1; }
  double T() const { return T_; }
  int n_t() const { return shape_[0]; }
  int n_x(int spatial_axis) const { return shape_[spatial_axis + 1]; }
  double dt() const { return spacing_[0]; }
  double dx(int spatial_axis) const { return spacing_[spatial_axis + 1]; }
  double min_dx() const;
  double box_lo(int spatial_axis) const { return origin_[spatial_axis + 1]; }
  double box_hi(int spatial_axis) const { return upper_[spatial_axis + 1]; }

  int shape(int axis) const { return shape_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  double origin(int axis) const { return origin_[axis]; }
  double upper(int axis) const { return upper_[axis]; }
  std::size_t stride(int axis) const { return stride_[axis]; }

  std::size_t size() const { return size_; }
  std::size_t spatial_size() const { return size_ / static_cast<std::size_t>(shape_[0]); }

  double coord(int axis, int i) const { return origin_[axis] + i * spacing_[axis]; }
  Point node(std::size_t flat) const;
  std::array<int, kMaxDim> unravel(std::size_t flat) const;
  std::size_t flat(const std::array<int, kMaxDim>& idx) const;

  /// Spatial node of a flat spatial index (no time component), stored at axes 1..n of a Point.
  Point spatial_node(std::size_t spatial_flat) const;
  std::array<int, kMaxDim> unravel_spatial(std::size_t spatial_flat) const;

  /// Distance (in cells) of a node to the nearest face of Q, over all axes.
  int boundary_distance(const std::array<int, kMaxDim>& idx) const;
  /// Distance of a spatial node to the nearest spatial face.
  int spatial_boundary_distance(const std::array<int, kMaxDim>& idx) const;

  Box bounding_box() const;
  double spatial_diameter() const;
  bool time_exceeds_diameter() const { return T_ > spatial_diameter(); }

  /// Grid with (factor * (n - 1) + 1) samples per axis; nodes of this grid are nodes of the result.
  SpacetimeGrid refined(int factor) const;

  double cell_volume() const;
  double spatial_cell_volume() const;

  bool operator==(const SpacetimeGrid& other) const;
  bool operator!=(const SpacetimeGrid& other) const { return !(*this == other); }

 private:
  int n_spatial_ = 0;
  double T_ = 0.0;
  std::array<int, kMaxDim> shape_{};
  std::array<double, kMaxDim> origin_{};
  std::array<double, kMaxDim> upper_{};
  std::array<double, kMaxDim> spacing_{};
  std::array<std::size_t, kMaxDim> stride_{};
  std::size_t size_ = 0;
};

void require_same_grid(const SpacetimeGrid& a, const SpacetimeGrid& b, const char* what);

}  // namespace lrlab
