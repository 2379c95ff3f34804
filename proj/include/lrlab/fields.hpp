#pragma once

#include <vector>

#include "lrlab/bump.hpp"
#include "lrlab/field.hpp"
#include "lrlab/finite_difference.hpp"

namespace lrlab {

fd::Layout layout_of(const SpacetimeGrid& grid);

/// Sampled bump with its closed form attached. Throws SupportViolation if the support box
/// reaches into the 2-cell margin of Q.
ScalarField make_bump(const BumpSpec& spec, const SpacetimeGrid& grid);
ScalarField make_bumps(const std::vector<BumpSpec>& specs, const SpacetimeGrid& grid);

/// Checks that a bump's support clears the 2-cell margin of the grid.
void check_bump_margin(const BumpSpec& spec, const SpacetimeGrid& grid);

/// ∂u/∂(axis); exact when a closed form with spare derivative order exists, else 4th-order FD.
ScalarField partial(const ScalarField& u, int axis);

CovectorField gradient_tx(const GaugeFunction& phi);
/// Gradient of any scalar field, without the compact-support requirement.
std::vector<ScalarField> gradient_components(const ScalarField& u);

CovectorField gauge_transform(const CovectorField& A, const GaugeFunction& phi);

/// q̃ = ∂_t A_0 − ∇_x·A + A_0² − |A|² + q.
ScalarField effective_potential(const CovectorField& A, const ScalarField& q);

/// h_ij = ∂_j F_i − ∂_i F_j.
TwoFormField exterior_derivative(const CovectorField& F);

/// a·u + b·v, keeping a closed form when both inputs carry one.
ScalarField linear_combination(double a, const ScalarField& u, double b, const ScalarField& v);
ScalarField scaled(double a, const ScalarField& u);
CovectorField scaled(double a, const CovectorField& A);
CovectorField add(const CovectorField& A, const CovectorField& B);

/// Multilinear interpolation; zero outside the grid box.
template <class T>
T interpolate(const BasicScalarField<T>& u, const Point& p);

/// Value at an arbitrary point: closed form when present, else multilinear interpolation.
double evaluate(const ScalarField& u, const Point& p);

/// Re-evaluates on another grid (closed form when present, else interpolation).
ScalarField resample(const ScalarField& u, const SpacetimeGrid& target);
CovectorField resample(const CovectorField& A, const SpacetimeGrid& target);
GaugeFunction resample(const GaugeFunction& phi, const SpacetimeGrid& target);

}  // namespace lrlab
