#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "lrlab/geometry.hpp"

namespace lrlab::fd {

/// Row-major array layout: shape and strides of up to kMaxDim axes.
struct Layout {
  int ndim = 0;
  std::array<int, kMaxDim> shape{};
  std::array<std::size_t, kMaxDim> stride{};
  std::size_t size() const;
  static Layout row_major(int ndim, const std::array<int, kMaxDim>& shape);
};

/// First derivative along `axis`. `order` 4: fourth-order central inside, second-order
/// near the ends. `order` 2: second-order central inside, 3-point one-sided at the ends.
template <class T>
std::vector<T> partial(const std::vector<T>& u, const Layout& lay, int axis, double h, int order = 4);

/// Second derivative along `axis`: 3-point central inside, 4-point one-sided at the ends.
template <class T>
std::vector<T> second(const std::vector<T>& u, const Layout& lay, int axis, double h);

}  // namespace lrlab::fd
