#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace lrlab {

/// Spacetime dimension is 1 + n with n <= 3.
inline constexpr int kMaxDim = 4;

/// A spacetime point (t, x_1, ..., x_n); entries past the active dimension are ignored.
using Point = std::array<double, kMaxDim>;

inline double dot(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Point& a, int dim) { return std::sqrt(dot(a, a, dim)); }

/// a + s * b
inline Point axpy(const Point& a, double s, const Point& b) {
  Point r{};
  for (int i = 0; i < kMaxDim; ++i) r[i] = a[i] + s * b[i];
  return r;
}

inline Point make_point(std::span<const double> values) {
  Point p{};
  for (std::size_t i = 0; i < values.size() && i < kMaxDim; ++i) p[i] = values[i];
  return p;
}

/// Closed axis-aligned box in spacetime, used for support bookkeeping.
struct Box {
  int dim = 0;
  Point lo{};
  Point hi{};

  bool contains(const Point& p, double tol = 0.0) const {
    for (int i = 0; i < dim; ++i)
      if (p[i] < lo[i] - tol || p[i] > hi[i] + tol) return false;
    return true;
  }

  /// Parameter interval {s : p + s d in box}; empty when first > second.
  std::pair<double, double> clip_line(const Point& p, const Point& d) const {
    double s0 = -INFINITY, s1 = INFINITY;
    for (int i = 0; i < dim; ++i) {
      if (std::abs(d[i]) < 1e-300) {
        if (p[i] < lo[i] || p[i] > hi[i]) return {1.0, 0.0};
        continue;
      }
      double a = (lo[i] - p[i]) / d[i];
      double b = (hi[i] - p[i]) / d[i];
      if (a > b) std::swap(a, b);
      s0 = std::max(s0, a);
      s1 = std::min(s1, b);
    }
    return {s0, s1};
  }

  static Box merge(const Box& a, const Box& b) {
    Box r = a;
    for (int i = 0; i < a.dim; ++i) {
      r.lo[i] = std::min(a.lo[i], b.lo[i]);
      r.hi[i] = std::max(a.hi[i], b.hi[i]);
    }
    return r;
  }

  static Box intersect(const Box& a, const Box& b) {
    Box r = a;
    for (int i = 0; i < a.dim; ++i) {
      r.lo[i] = std::max(a.lo[i], b.lo[i]);
      r.hi[i] = std::min(a.hi[i], b.hi[i]);
    }
    return r;
  }

  bool empty() const {
    for (int i = 0; i < dim; ++i)
      if (lo[i] > hi[i]) return true;
    return false;
  }
};

}  // namespace lrlab
