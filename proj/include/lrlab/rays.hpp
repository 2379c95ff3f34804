#pragma once

#include <optional>

#include "lrlab/field.hpp"
#include "lrlab/quadrature.hpp"

namespace lrlab {

/// Line integrals of a contracted covector field along spacetime lines p + s·d.
/// Closed-form components are integrated with composite Gauss–Legendre over the exact
/// support interval; sampled components with the trapezoid rule at step min(dt, dx)/2
/// over multilinear interpolants.
class RayIntegrator {
 public:
  explicit RayIntegrator(const CovectorField& F);

  struct Result {
    double value = 0.0;
    Point grad{};                                   ///< ∂/∂p of the integral
    std::array<double, kMaxDim * kMaxDim> hess{};  ///< ∂²/∂p² of the integral
  };

  /// ∫_{s0}^{s1} c·F(p + s d) ds with c the contraction covector; infinite limits allowed.
  /// `order` 0, 1, 2 selects how many derivatives in p are produced (closed form only).
  Result integrate(const Point& p, const Point& d, const Point& c, double s0, double s1, int order = 0) const;

  bool analytic() const { return analytic_; }
  const Box& support() const { return support_; }
  int dim() const { return dim_; }

 private:
  CovectorField F_;
  bool analytic_ = false;
  int dim_ = 0;
  Box support_;
  double step_ = 0.0;
  quad::GaussLegendre rule_{10};
  double panel_ = 0.05;
};

}  // namespace lrlab
