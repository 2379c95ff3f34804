#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "lrlab/fft.hpp"
#include "lrlab/field.hpp"
#include "lrlab/lray.hpp"
#include "lrlab/pde.hpp"

namespace lrlab {

struct PocsOptions {
  int max_iter = 500;
  double tol = 1e-10;
  double relaxation = 1.0;
};

struct ReconConfig {
  std::vector<double> tilt_angles{0.05, 0.1};
  double spacelike_margin = 0.9;  ///< lattice ζ used when |τ| ≤ margin·|ξ|
  PocsOptions pocs;
  std::optional<Point> path_origin;  ///< defaults to the lower corner of Q
  double slice_spacing = 0.03;       ///< hyperplane lattice spacing for line-integral data
};

/// Source of transverse ray data √2·F_{(1,ω)^⊥}(I(dF)(·, e_j))(ζ) for requested (ζ, ω).
class RayDataProvider {
 public:
  virtual ~RayDataProvider() = default;
  virtual const SpacetimeGrid& grid() const = 0;
  virtual ConeSamples transverse(const Point& zeta, const std::vector<Direction>& dirs) const = 0;
};

/// Integrates the transverse ray transform of dF along light rays and transforms over each hyperplane.
class LineIntegralRayData final : public RayDataProvider {
 public:
  LineIntegralRayData(const CovectorField& F, double spacing);
  const SpacetimeGrid& grid() const override { return F_.grid(); }
  ConeSamples transverse(const Point& zeta, const std::vector<Direction>& dirs) const override;

 private:
  CovectorField F_;
  TwoFormField h_;
  Box support_;
  double spacing_;
};

/// Evaluates the same data through the slice identity from the ambient spectrum of h = dF:
/// ω̃ᵀĥ(ζ)e_j. Restricted to lattice frequencies.
class FieldSpectrumRayData final : public RayDataProvider {
 public:
  explicit FieldSpectrumRayData(const CovectorField& F);
  const SpacetimeGrid& grid() const override { return lattice_.grid(); }
  ConeSamples transverse(const Point& zeta, const std::vector<Direction>& dirs) const override;

 private:
  SpectralLattice lattice_;
  std::vector<std::vector<cplx>> spectrum_;  ///< continuous transform of each h_ij, i < j, on the lattice
};

struct PocsLogEntry {
  int iter = 0;
  double cone_misfit = 0.0;
  double support_leak = 0.0;
  double increment = 0.0;
};

struct PocsResult {
  ScalarField field;
  std::vector<PocsLogEntry> log;
  bool converged = false;
};

struct CurvatureResult {
  TwoFormField h;
  std::vector<PocsLogEntry> worst_log;
  bool converged = true;
  int spacelike_count = 0;
  double max_condition = 0.0;
  double max_asymmetry = 0.0;
};

/// Box-shaped support mask on the grid, rejected unless it stays two cells inside Q.
std::vector<bool> support_mask(const SpacetimeGrid& grid, const Box& box);

/// Lattice frequencies with ξ ≠ 0 and |τ| ≤ margin·|ξ|.
std::vector<std::size_t> spacelike_indices(const SpectralLattice& lattice, double margin);

CurvatureResult recover_curvature(const RayDataProvider& data, const std::vector<bool>& mask, const ReconConfig& config);

/// Staircase path integral of F from the origin, axes taken in `order` (default t, x₁, …, x_n).
GaugeFunction poincare_integrate(const CovectorField& F, std::optional<Point> origin = std::nullopt,
                                 std::vector<int> order = {});

/// Support-constrained spectral extrapolation of a real field from cone data (continuous-transform values).
PocsResult recover_q(const ConeSamples& cone, const SpacetimeGrid& grid, const std::vector<bool>& mask,
                     const ReconConfig& config);

/// Continuous-transform values of a scalar field on the space-like lattice (synthetic cone data).
ConeSamples spectral_cone_data(const ScalarField& q, double margin);

struct PairingTrend {
  std::vector<double> h;
  std::vector<cplx> pairing;
  cplx extrapolated{};
  cplx target{};
  double rate = 0.0;
  double relative_error = 0.0;
};

struct PairingSetup {
  CovectorField A1, A2;
  ScalarField q;
  Direction omega;
  std::vector<double> zeta;  ///< slice frequency for the growing amplitude
};

/// ∫_Q(−2A·∇u₂ + 2A₀∂_tu₂ + q̃u₂)v̄ for A = A₂ − A₁, u₂ solving the A₂ problem with data of the growing
/// GO solution and v the decaying GO solution of the A₁ adjoint, at each h; Richardson extrapolation to h → 0.
PairingTrend extract_raydata_from_lambda(const PairingSetup& setup, const std::vector<double>& h_grid);

}  // namespace lrlab
