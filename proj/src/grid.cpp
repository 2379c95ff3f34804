#include "lrlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lrlab/error.hpp"

namespace lrlab {

SpacetimeGrid::SpacetimeGrid(int n_spatial, double T, std::array<double, 3> box_lo,
                             std::array<double, 3> box_hi, int n_t, std::array<int, 3> n_x)
    : n_spatial_(n_spatial), T_(T) {
  require(n_spatial >= 1 && n_spatial <= 3, ErrorCode::InvalidArgument,
          "n_spatial must be 1, 2 or 3, got " + std::to_string(n_spatial));
  require(T > 0.0, ErrorCode::InvalidArgument, "T must be positive");
  require(n_t >= 4, ErrorCode::InvalidArgument, "n_t must be >= 4");
  shape_.fill(1);
  shape_[0] = n_t;
  origin_[0] = 0.0;
  upper_[0] = T;
  spacing_[0] = T / (n_t - 1);
  for (int k = 0; k < n_spatial; ++k) {
    require(n_x[k] >= 4, ErrorCode::InvalidArgument, "n_x must be >= 4 on every axis");
    require(box_hi[k] > box_lo[k], ErrorCode::InvalidArgument, "empty spatial box");
    shape_[k + 1] = n_x[k];
    origin_[k + 1] = box_lo[k];
    upper_[k + 1] = box_hi[k];
    spacing_[k + 1] = (box_hi[k] - box_lo[k]) / (n_x[k] - 1);
  }
  std::size_t s = 1;
  for (int a = dim() - 1; a >= 0; --a) {
    stride_[a] = s;
    s *= static_cast<std::size_t>(shape_[a]);
  }
  size_ = s;
}

SpacetimeGrid SpacetimeGrid::cube(int n_spatial, double T, double lo, double hi, int n_t, int n_x) {
  return SpacetimeGrid(n_spatial, T, {lo, lo, lo}, {hi, hi, hi}, n_t, {n_x, n_x, n_x});
}

double SpacetimeGrid::min_dx() const {
  double m = spacing_[1];
  for (int k = 2; k <= n_spatial_; ++k) m = std::min(m, spacing_[k]);
  return m;
}

std::array<int, kMaxDim> SpacetimeGrid::unravel(std::size_t flat) const {
  std::array<int, kMaxDim> idx{};
  for (int a = 0; a < dim(); ++a) {
    idx[a] = static_cast<int>(flat / stride_[a]);
    flat %= stride_[a];
  }
  return idx;
}

std::size_t SpacetimeGrid::flat(const std::array<int, kMaxDim>& idx) const {
  std::size_t f = 0;
  for (int a = 0; a < dim(); ++a) f += static_cast<std::size_t>(idx[a]) * stride_[a];
  return f;
}

Point SpacetimeGrid::node(std::size_t flat_index) const {
  auto idx = unravel(flat_index);
  Point p{};
  for (int a = 0; a < dim(); ++a) p[a] = coord(a, idx[a]);
  return p;
}

std::array<int, kMaxDim> SpacetimeGrid::unravel_spatial(std::size_t spatial_flat) const {
  std::array<int, kMaxDim> idx{};
  for (int a = 1; a < dim(); ++a) {
    idx[a] = static_cast<int>(spatial_flat / stride_[a]);
    spatial_flat %= stride_[a];
  }
  return idx;
}

Point SpacetimeGrid::spatial_node(std::size_t spatial_flat) const {
  auto idx = unravel_spatial(spatial_flat);
  Point p{};
  for (int a = 1; a < dim(); ++a) p[a] = coord(a, idx[a]);
  return p;
}

int SpacetimeGrid::boundary_distance(const std::array<int, kMaxDim>& idx) const {
  int d = idx[0];
  for (int a = 0; a < dim(); ++a) d = std::min({d, idx[a], shape_[a] - 1 - idx[a]});
  return d;
}

int SpacetimeGrid::spatial_boundary_distance(const std::array<int, kMaxDim>& idx) const {
  int d = shape_[1];
  for (int a = 1; a < dim(); ++a) d = std::min({d, idx[a], shape_[a] - 1 - idx[a]});
  return d;
}

Box SpacetimeGrid::bounding_box() const {
  Box b;
  b.dim = dim();
  for (int a = 0; a < dim(); ++a) {
    b.lo[a] = origin_[a];
    b.hi[a] = upper_[a];
  }
  return b;
}

double SpacetimeGrid::spatial_diameter() const {
  double s = 0.0;
  for (int k = 1; k <= n_spatial_; ++k) s += (upper_[k] - origin_[k]) * (upper_[k] - origin_[k]);
  return std::sqrt(s);
}

SpacetimeGrid SpacetimeGrid::refined(int factor) const {
  std::array<double, 3> lo{}, hi{};
  std::array<int, 3> nx{4, 4, 4};
  for (int k = 0; k < n_spatial_; ++k) {
    lo[k] = origin_[k + 1];
    hi[k] = upper_[k + 1];
    nx[k] = factor * (shape_[k + 1] - 1) + 1;
  }
  return SpacetimeGrid(n_spatial_, T_, lo, hi, factor * (shape_[0] - 1) + 1, nx);
}

double SpacetimeGrid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= spacing_[a];
  return v;
}

double SpacetimeGrid::spatial_cell_volume() const {
  double v = 1.0;
  for (int a = 1; a < dim(); ++a) v *= spacing_[a];
  return v;
}

bool SpacetimeGrid::operator==(const SpacetimeGrid& o) const {
  if (n_spatial_ != o.n_spatial_ || T_ != o.T_) return false;
  for (int a = 0; a < dim(); ++a)
    if (shape_[a] != o.shape_[a] || origin_[a] != o.origin_[a] || upper_[a] != o.upper_[a])
      return false;
  return true;
}

void require_same_grid(const SpacetimeGrid& a, const SpacetimeGrid& b, const char* what) {
  if (a != b) fail(ErrorCode::GridMismatch, std::string(what) + ": fields live on different grids");
}

}  // namespace lrlab
