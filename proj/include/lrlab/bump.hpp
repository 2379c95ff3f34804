#pragma once

#include <string>
#include <vector>

#include "lrlab/analytic.hpp"
#include "lrlab/geometry.hpp"

namespace lrlab {

enum class BumpKind { Smooth, GaussianTruncated, Polynomial };

BumpKind bump_kind_from_string(const std::string& s);
std::string to_string(BumpKind kind);

/// Compactly supported bump g(rho), rho = sum_i ((p_i - c_i) / r_i)^2, scaled by `amplitude`.
/// Every profile has g(0) = 1 and vanishes for rho >= 1.
struct BumpSpec {
  Point center{};
  Point radii{};
  double amplitude = 1.0;
  BumpKind kind = BumpKind::Smooth;

  Box support(int dim) const;
};

/// Radial profile and its first three derivatives in rho.
struct ProfileJet {
  double g = 0.0, g1 = 0.0, g2 = 0.0, g3 = 0.0;
};

ProfileJet bump_profile(BumpKind kind, double rho);

/// Closed-form field equal to the sum of the given bumps.
AnalyticField bump_field(int dim, std::vector<BumpSpec> bumps);

}  // namespace lrlab
