#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lrlab/field.hpp"
#include "lrlab/go.hpp"

namespace lrlab {

/// Linear weight φ = t + x·ω and its convexified form φ̃ = φ − ht²/(2ε).
struct CarlemanWeight {
  Direction omega;
  double eps = 0.5;
  double h = 0.1;

  static CarlemanWeight make(Direction omega, double eps, double h, double h0 = 1.0);
  double phi(const Point& p) const;
  double phi_tilde(const Point& p) const;
  /// Asserts φ̃ ≤ φ at every node with t ∈ [0, T].
  void check_order(const SpacetimeGrid& grid) const;
};

struct EstimateReport {
  std::vector<std::pair<std::string, double>> lhs_terms;
  std::vector<std::pair<std::string, double>> rhs_terms;
  double lhs_total = 0.0;
  double rhs_total = 0.0;
  double ratio = 0.0;
  double h = 0.0;
  /// Terms are stored multiplied by e^{−log_scale}: the absolute value of a term is term·e^{log_scale}.
  double log_scale = 0.0;
};

double sobolev_norm_scl(const ScalarField& u, double h, int s);

/// Semiclassical norm of periodic samples on a torus with the given shape and spacing (s ∈ {−1, 0, 1}).
double torus_norm_scl(const std::vector<cplx>& samples, const std::vector<int>& shape, const std::vector<double>& spacing,
                      double h, int s);

EstimateReport boundary_estimate_sides(const CovectorField& A, const ScalarField& q, const ScalarField& u,
                                       const CarlemanWeight& weight);

enum class CarlemanOperator { Direct, Adjoint };

struct InteriorRatio {
  double ratio = 0.0;
  double numerator = 0.0;    ///< h‖u‖_{H^{1+s}}
  double denominator = 0.0;  ///< ‖ℒ_φ u‖_{H^s}
  bool degenerate = false;   ///< ℒ_φ u ≡ 0; ratio is +∞
};

/// h‖u‖_{H^{1+s}scl} / ‖ℒ_φ u‖_{H^s scl} with ℒ_φ = h²e^{−φ/h}ℒ_{𝒜,q}e^{φ/h}, or its adjoint
/// h²e^{φ/h}ℒ_{−𝒜,q}e^{−φ/h}, expanded so that no exponential is formed.
InteriorRatio interior_estimate_ratio(const CovectorField& A, const ScalarField& q, const ScalarField& u,
                                      const CarlemanWeight& weight, int s,
                                      CarlemanOperator op = CarlemanOperator::Direct);

/// ℒ_φ u sampled on the grid.
ScalarField conjugated_operator(const CovectorField& A, const ScalarField& q, const ScalarField& u,
                                const CarlemanWeight& weight, CarlemanOperator op = CarlemanOperator::Direct);

struct CarlemanCase {
  std::string label;
  double amplitude = 0.0;
  ScalarField u;
  CovectorField A;
  ScalarField q;
};

/// Compact profiles (two smooth, two polynomial, one truncated Gaussian) on (0, 1) x [-1, 1]^2,
/// each paired with bump coefficients (A, q) scaled by every amplitude in {0, 0.5, 1}.
std::vector<CarlemanCase> default_carleman_family(int n_x = 41);
Direction default_carleman_direction();

struct SweepSeries {
  std::vector<double> h;
  std::vector<double> ratio;
  std::vector<std::string> term_names;
  std::vector<std::vector<double>> terms;  ///< one row per h, in term_names order
  double max_growth = 0.0;                  ///< max ratio(h_{k+1}) / ratio(h_k); +inf if any ratio is not finite
};

SweepSeries boundary_sweep(const CovectorField& A, const ScalarField& q, const ScalarField& u, const Direction& omega,
                           double eps, const std::vector<double>& hs);
SweepSeries interior_sweep(const CovectorField& A, const ScalarField& q, const ScalarField& u, const Direction& omega,
                           double eps, const std::vector<double>& hs, int s,
                           CarlemanOperator op = CarlemanOperator::Direct);

}  // namespace lrlab
