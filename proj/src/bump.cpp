#include "lrlab/bump.hpp"

#include <cmath>

#include "lrlab/error.hpp"

namespace lrlab {

BumpKind bump_kind_from_string(const std::string& s) {
  if (s == "smooth-bump" || s == "smooth") return BumpKind::Smooth;
  if (s == "gaussian-truncated") return BumpKind::GaussianTruncated;
  if (s == "polynomial-bump" || s == "polynomial") return BumpKind::Polynomial;
  fail(ErrorCode::InvalidArgument, "unknown bump kind '" + s + "'");
}

std::string to_string(BumpKind kind) {
  switch (kind) {
    case BumpKind::Smooth: return "smooth-bump";
    case BumpKind::GaussianTruncated: return "gaussian-truncated";
    case BumpKind::Polynomial: return "polynomial-bump";
  }
  return "smooth-bump";
}

Box BumpSpec::support(int dim) const {
  Box b;
  b.dim = dim;
  for (int i = 0; i < dim; ++i) {
    b.lo[i] = center[i] - radii[i];
    b.hi[i] = center[i] + radii[i];
  }
  return b;
}

ProfileJet bump_profile(BumpKind kind, double rho) {
  ProfileJet p;
  if (rho >= 1.0) return p;
  const double s = 1.0 - rho;
  switch (kind) {
    case BumpKind::Smooth: {
      const double w = 1.0 / s;
      p.g = std::exp(1.0 - w);
      const double w2 = w * w, w3 = w2 * w, w4 = w2 * w2;
      p.g1 = -w2 * p.g;
      p.g2 = (w4 - 2.0 * w3) * p.g;
      p.g3 = (-w4 * w2 + 6.0 * w4 * w - 6.0 * w4) * p.g;
      break;
    }
    case BumpKind::Polynomial: {
      const double s2 = s * s, s3 = s2 * s;
      p.g = s3 * s3;
      p.g1 = -6.0 * s3 * s2;
      p.g2 = 30.0 * s2 * s2;
      p.g3 = -120.0 * s3;
      break;
    }
    case BumpKind::GaussianTruncated: {
      const double a = std::exp(-4.0 * rho);
      const double b = s * s * s * s, b1 = -4.0 * s * s * s, b2 = 12.0 * s * s, b3 = -24.0 * s;
      p.g = a * b;
      p.g1 = a * (-4.0 * b + b1);
      p.g2 = a * (16.0 * b - 8.0 * b1 + b2);
      p.g3 = a * (-64.0 * b + 48.0 * b1 - 12.0 * b2 + b3);
      break;
    }
  }
  return p;
}

namespace {

struct BumpSumNode final : AnalyticField::Node {
  int dim;
  std::vector<BumpSpec> bumps;

  Jet eval(const Point& p, int order) const override {
    Jet j;
    j.order = order;
    for (const auto& b : bumps) {
      if (b.amplitude == 0.0) continue;
      double y[kMaxDim] = {}, r1[kMaxDim] = {}, inv_r2[kMaxDim] = {};
      double rho = 0.0;
      bool outside = false;
      for (int i = 0; i < dim; ++i) {
        y[i] = p[i] - b.center[i];
        if (std::abs(y[i]) >= b.radii[i]) {
          outside = true;
          break;
        }
        inv_r2[i] = 1.0 / (b.radii[i] * b.radii[i]);
        r1[i] = 2.0 * y[i] * inv_r2[i];
        rho += y[i] * y[i] * inv_r2[i];
      }
      if (outside || rho >= 1.0) continue;
      const ProfileJet g = bump_profile(b.kind, rho);
      const double a = b.amplitude;
      j.v += a * g.g;
      if (order >= 1)
        for (int i = 0; i < dim; ++i) j.d1[i] += a * g.g1 * r1[i];
      if (order >= 2)
        for (int i = 0; i < dim; ++i)
          for (int k = 0; k < dim; ++k) {
            double v = g.g2 * r1[i] * r1[k];
            if (i == k) v += g.g1 * 2.0 * inv_r2[i];
            j.d2[i * kMaxDim + k] += a * v;
          }
      if (order >= 3)
        for (int i = 0; i < dim; ++i)
          for (int k = 0; k < dim; ++k)
            for (int l = 0; l < dim; ++l) {
              double v = g.g3 * r1[i] * r1[k] * r1[l];
              if (i == k) v += g.g2 * 2.0 * inv_r2[i] * r1[l];
              if (i == l) v += g.g2 * 2.0 * inv_r2[i] * r1[k];
              if (k == l) v += g.g2 * 2.0 * inv_r2[k] * r1[i];
              j.d3[(i * kMaxDim + k) * kMaxDim + l] += a * v;
            }
    }
    return j;
  }

  int max_order() const override { return 3; }

  std::optional<Box> support() const override {
    std::optional<Box> acc;
    for (const auto& b : bumps) {
      if (b.amplitude == 0.0) continue;
      const Box s = b.support(dim);
      acc = acc ? Box::merge(*acc, s) : s;
    }
    if (!acc) {
      Box e;
      e.dim = dim;
      e.lo.fill(1.0);
      e.hi.fill(0.0);
      return e;
    }
    return acc;
  }
};

}  // namespace

AnalyticField bump_field(int dim, std::vector<BumpSpec> bumps) {
  for (const auto& b : bumps)
    for (int i = 0; i < dim; ++i)
      require(b.radii[i] > 0.0, ErrorCode::InvalidArgument, "bump radii must be positive");
  auto n = std::make_shared<BumpSumNode>();
  n->dim = dim;
  n->bumps = std::move(bumps);
  return AnalyticField(dim, n);
}

}  // namespace lrlab
