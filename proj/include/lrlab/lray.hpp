#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lrlab/field.hpp"
#include "lrlab/go.hpp"

namespace lrlab {

/// Line base + s(1, ω) in spacetime. Rays with direction (1, −ω) are written with ω negated.
struct Ray {
  Point base{};
  Direction dir;
};

double light_ray_transform(const CovectorField& F, const Ray& ray);
/// Unweighted line integral of a scalar field along the ray.
double light_ray_transform(const ScalarField& g, const Ray& ray);
double transverse_ray_transform(const TwoFormField& h, const Ray& ray, const Point& eta);

/// Orthonormal basis of the hyperplane (1, ω)^⊥ with a uniform lattice around a centre point.
struct HyperplaneFrame {
  Direction dir;
  std::vector<Point> basis;
  Point center{};
  double spacing = 0.04;
  int half_count = 0;  ///< lattice coordinates run over spacing·{−half_count, …, half_count}

  /// Lattice centred on the projection of the box centre and wide enough to cover the whole box.
  static HyperplaneFrame make(const Direction& dir, const Box& support, double spacing);
  int n() const { return dir.n(); }
  std::size_t size() const;
  Point node(std::size_t i) const;
  double cell() const;
};

struct ConeSample {
  Point zeta{};
  std::vector<double> omega;
  int eta = -1;  ///< index of the basis covector for transverse data, −1 otherwise
  cplx value{};
};
using ConeSamples = std::vector<ConeSample>;

/// √2 · hyperplane Fourier transform of the light ray transform, at each ζ ⟂ (1, ω).
ConeSamples fourier_slice(const CovectorField& F, const HyperplaneFrame& frame, const std::vector<Point>& zetas);
ConeSamples fourier_slice(const ScalarField& g, const HyperplaneFrame& frame, const std::vector<Point>& zetas);
/// Same for the transverse ray transform, one sample per (ζ, basis covector e_j).
ConeSamples transverse_slice(const TwoFormField& h, const HyperplaneFrame& frame, const std::vector<Point>& zetas);

/// Ambient Fourier transform ∫ g e^{−iζ·p} by the product trapezoid rule over the grid.
cplx direct_dft(const ScalarField& g, const Point& zeta);

struct HyperplaneProjection {
  Point point{};
  double s = 0.0;
};

/// Projection onto (1, −ω)^⊥ along (1, −ω); p = point + s(1, −ω).
HyperplaneProjection project_to_hyperplane(const Point& p, const Direction& omega);

struct SliceIdentity {
  cplx J{};
  cplx rhs{};
};

/// Both sides of J = −√2 F_{(1,−ω)^⊥}(1 − exp(∫_R ω̃·A))(ξ) with ω̃ = (1, −ω).
/// Uniform lattices of the given spacing cover the support box of A in both quadratures.
SliceIdentity nonlinear_slice_identity(const CovectorField& A, const Direction& omega, const Point& xi,
                                       double spacing = 0.04);
std::vector<SliceIdentity> nonlinear_slice_identity(const CovectorField& A, const Direction& omega,
                                                    const std::vector<Point>& xis, double spacing = 0.04);

/// Directions ω with (1, ω) ⟂ ζ used to sample ĥ(ζ): a base direction and its rotations by ±α
/// about ξ/|ξ| (n = 3), or the two admissible directions (n = 2).
std::vector<Direction> hhat_directions(const Point& zeta, int n, const std::vector<double>& angles = {0.05, 0.1});

struct HhatSolution {
  Eigen::MatrixXcd h;        ///< antisymmetric (1+n)×(1+n)
  double asymmetry = 0.0;    ///< ‖H + Hᵀ‖/‖H‖ before antisymmetrization
  double condition = 0.0;
  double residual = 0.0;     ///< relative residual of the overdetermined system
};

/// Recovers ĥ(ζ) from transverse slice data at ζ for several directions.
HhatSolution solve_hhat_system(const ConeSamples& samples, const Point& zeta, int n);

}  // namespace lrlab
