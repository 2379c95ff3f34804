#include "lrlab/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "lrlab/error.hpp"

namespace lrlab::quad {

GaussLegendre::GaussLegendre(int n) : x(n), w(n) {
  require(n >= 1, ErrorCode::InvalidArgument, "Gauss-Legendre order must be >= 1");
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

std::vector<double> trapezoid_weights(const SpacetimeGrid& g) {
  std::vector<double> w(g.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto idx = g.unravel(i);
    double v = 1.0;
    for (int a = 0; a < g.dim(); ++a) v *= trap_weight(idx[a], g.shape(a), g.spacing(a));
    w[i] = v;
  }
  return w;
}

std::vector<double> spatial_trapezoid_weights(const SpacetimeGrid& g) {
  std::vector<double> w(g.spatial_size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto idx = g.unravel_spatial(i);
    double v = 1.0;
    for (int a = 1; a < g.dim(); ++a) v *= trap_weight(idx[a], g.shape(a), g.spacing(a));
    w[i] = v;
  }
  return w;
}

}  // namespace lrlab::quad
