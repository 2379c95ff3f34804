#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "lrlab/field.hpp"
#include "lrlab/fields.hpp"

namespace lrlab {

/// Cauchy data at t = 0, one value per spatial node (spatial row-major order).
template <class T>
struct BasicInitialData {
  std::vector<T> phi;
  std::vector<T> psi;
};

/// Dirichlet values on Σ. Stored over the whole spacetime grid; only boundary nodes are read.
template <class T>
struct BasicDirichletData {
  std::vector<T> values;
};

using InitialData = BasicInitialData<double>;
using DirichletData = BasicDirichletData<double>;

/// Builds initial and boundary data from a function of (t, x) and its time derivative.
template <class T>
BasicInitialData<T> initial_from(const SpacetimeGrid& g, const std::function<T(const Point&)>& u,
                                 const std::function<T(const Point&)>& dt_u);
template <class T>
BasicDirichletData<T> dirichlet_from(const SpacetimeGrid& g, const std::function<T(const Point&)>& u);

/// Faces of the box, indexed 2k + side (side 0: x_k = lo, outward normal −e_k; side 1: x_k = hi).
struct BoundaryRegions {
  std::vector<double> omega0;
  std::vector<bool> shadowed;     ///< ν·ω₀ ≥ 0
  std::vector<bool> illuminated;  ///< ν·ω₀ ≤ 0
  std::vector<bool> G;            ///< measured Neumann faces, ⊇ illuminated
  std::vector<bool> F;            ///< ⊇ shadowed

  int n_faces() const { return static_cast<int>(shadowed.size()); }
  /// Default masks: G = illuminated faces, F = shadowed faces.
  static BoundaryRegions from_direction(int n_spatial, std::vector<double> omega0);
  /// Replaces G, checking that it contains every illuminated face.
  BoundaryRegions with_G(std::vector<bool> g) const;
};

/// Outward normal of face f.
double face_normal_sign(int face);
int face_axis(int face);

template <class T>
struct BasicWaveState {
  SpacetimeGrid grid;
  std::vector<T> u;
  double cfl = 0.0;
};

using WaveState = BasicWaveState<double>;
using ComplexWaveState = BasicWaveState<cplx>;

/// ∂_ν u on one face for every time step; values are row-major over (t, remaining spatial axes).
template <class T>
struct FaceTrace {
  int face = 0;
  std::vector<T> values;
};

template <class T>
struct BasicLambdaData {
  std::vector<FaceTrace<T>> neumann_G;
  std::vector<T> final_u;
  std::vector<T> final_dtu;
};

using LambdaData = BasicLambdaData<double>;

/// Leapfrog solve of ∂²_t u − Δu + 2A₀∂_t u − 2A·∇u + q̃u = g with Dirichlet data on Σ.
/// `source` (optional, full grid) is the right-hand side g.
template <class T>
BasicWaveState<T> solve_ibvp(const CovectorField& A, const ScalarField& q,
                             const BasicInitialData<T>& init, const BasicDirichletData<T>& f,
                             const SpacetimeGrid& grid, const std::vector<T>* source = nullptr);

double cfl_number(const SpacetimeGrid& grid);

template <class T>
std::vector<FaceTrace<T>> neumann_trace(const BasicWaveState<T>& u, const std::vector<bool>& faces);

template <class T>
BasicLambdaData<T> input_output_map(const CovectorField& A, const ScalarField& q,
                                    const BasicInitialData<T>& init, const BasicDirichletData<T>& f,
                                    const BoundaryRegions& region);

template <class T>
BasicLambdaData<T> lambda_from_state(const BasicWaveState<T>& u, const BoundaryRegions& region);

/// sup-norm difference over every entry of two LambdaData of the same shape.
double lambda_difference(const LambdaData& a, const LambdaData& b);

/// Discrete energy ∫(|∂_t u|² + |∇u|² + q u²)dx on each interval [t_m, t_{m+1}], in the staggered
/// form that leapfrog conserves exactly when A = 0 and q is time independent.
std::vector<double> discrete_energy(const WaveState& u, const ScalarField& q);

enum class AdjointDerivatives { Analytic, FiniteDifference };

/// |∫(L_{A,q}u)v − ∫u(L_{−A,q}v) − ∫_Ω(∂_t u(T)v(T) − u(T)∂_t v(T)) + ∫_Σ ∂_ν u v|.
/// u is differentiated with second-order differences. With `Analytic`, v uses its closed form
/// when present; with `FiniteDifference` both sides use the same stencils, so for compactly
/// supported u and v the two volume sums agree to rounding (summation by parts).
double greens_identity_residual(const CovectorField& A, const ScalarField& q, const ScalarField& u,
                                const ScalarField& v,
                                AdjointDerivatives mode = AdjointDerivatives::Analytic);

struct GaugeCheckReport {
  double u_discrepancy = 0.0;       ///< sup_Q |u₂ − e^{−Φ}u₁|
  double lambda_discrepancy = 0.0;  ///< sup |Λ₂ − Λ₁|
  double u_discrepancy_fine = 0.0;
  double lambda_discrepancy_fine = 0.0;
  double u_order = 0.0;
  double lambda_order = 0.0;
};

/// Pure-data probe (φ, ψ, f) given as closed-form functions; resampled on every grid used.
struct Probe {
  std::function<double(const Point&)> u;
  std::function<double(const Point&)> dt_u;
};

/// Solves with A and with A + ∇Φ on `grid` and on its 2× refinement. Coefficient fields must
/// carry closed forms so they can be resampled.
GaugeCheckReport gauge_equivalence_check(const CovectorField& A, const ScalarField& q,
                                         const GaugeFunction& phi, const Probe& probe,
                                         const BoundaryRegions& region, bool refine = true);

}  // namespace lrlab
