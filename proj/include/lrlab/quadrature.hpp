#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "lrlab/grid.hpp"

namespace lrlab::quad {

/// Gauss–Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int n);
};

/// Composite Gauss–Legendre rule for ∫_a^b f, `panels` equal panels of `order` points.
template <class F>
auto integrate_gl(F&& f, double a, double b, int panels, const GaussLegendre& rule) {
  using R = decltype(f(a));
  R acc{};
  if (!(b > a)) return acc;
  const double len = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * len, half = 0.5 * len;
    for (std::size_t k = 0; k < rule.x.size(); ++k) acc += (rule.w[k] * half) * f(mid + half * rule.x[k]);
  }
  return acc;
}

/// Trapezoid weight of sample i on an axis with n samples and spacing h.
inline double trap_weight(int i, int n, double h) { return (i == 0 || i == n - 1) ? 0.5 * h : h; }

/// Full-grid composite trapezoid weights (product rule over all spacetime axes).
std::vector<double> trapezoid_weights(const SpacetimeGrid& g);
/// Spatial-slice trapezoid weights (axes 1..n).
std::vector<double> spatial_trapezoid_weights(const SpacetimeGrid& g);

/// Σ w_i f_i with a fixed summation order.
template <class T>
T weighted_sum(const std::vector<double>& w, const std::vector<T>& f) {
  T acc{};
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * f[i];
  return acc;
}

}  // namespace lrlab::quad
