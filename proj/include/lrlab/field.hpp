#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "lrlab/analytic.hpp"
#include "lrlab/grid.hpp"

namespace lrlab {

using cplx = std::complex<double>;

/// Samples of a scalar function on a spacetime grid, optionally paired with a closed form.
/// Immutable; copies share storage.
template <class T>
class BasicScalarField {
 public:
  using value_type = T;

  BasicScalarField() = default;
  BasicScalarField(SpacetimeGrid grid, std::vector<T> samples);

  static BasicScalarField zeros(const SpacetimeGrid& grid) {
    return BasicScalarField(grid, std::vector<T>(grid.size(), T{}));
  }

  const SpacetimeGrid& grid() const { return grid_; }
  std::span<const T> samples() const { return {data_->data(), data_->size()}; }
  const std::vector<T>& vec() const { return *data_; }
  std::size_t size() const { return data_ ? data_->size() : 0; }
  const T& operator[](std::size_t i) const { return (*data_)[i]; }
  const T& at(const std::array<int, kMaxDim>& idx) const { return (*data_)[grid_.flat(idx)]; }

  bool empty() const { return !data_; }
  bool has_analytic() const { return analytic_.valid(); }
  const AnalyticField& analytic() const { return analytic_; }

  /// Attaches a closed form; samples are left untouched.
  BasicScalarField with_analytic(AnalyticField f) const {
    BasicScalarField r = *this;
    r.analytic_ = std::move(f);
    return r;
  }

  double max_abs() const;

 private:
  SpacetimeGrid grid_;
  std::shared_ptr<const std::vector<T>> data_;
  AnalyticField analytic_;
};

using ScalarField = BasicScalarField<double>;
using ComplexField = BasicScalarField<cplx>;

/// Samples a closed form at every grid node and keeps the closed form attached.
ScalarField sample(const SpacetimeGrid& grid, const AnalyticField& f);

/// Max |u| over nodes within `layers` cells of any face of Q.
template <class T>
double boundary_layer_max(const BasicScalarField<T>& u, int layers);

/// Components (A_0, A_1, ..., A_n) of a real 1-form on Q.
class CovectorField {
 public:
  CovectorField() = default;
  /// Checks grid agreement and that every component vanishes on the outer 2 layers of Q.
  explicit CovectorField(std::vector<ScalarField> components, bool require_compact = true);

  static CovectorField zeros(const SpacetimeGrid& grid);
  static CovectorField from_analytic(const SpacetimeGrid& grid, const std::vector<AnalyticField>& comps);

  const SpacetimeGrid& grid() const { return comps_.front().grid(); }
  int size() const { return static_cast<int>(comps_.size()); }
  const ScalarField& operator[](int i) const { return comps_[i]; }
  const std::vector<ScalarField>& components() const { return comps_; }
  bool has_analytic() const;
  /// Union of component supports if all are analytic and bounded.
  std::optional<Box> support() const;

 private:
  std::vector<ScalarField> comps_;
};

/// Compactly supported scalar Φ used to shift potentials.
class GaugeFunction {
 public:
  GaugeFunction() = default;
  /// Rejects Φ whose values or first derivatives do not vanish on ∂Q.
  explicit GaugeFunction(ScalarField phi);
  const ScalarField& phi() const { return phi_; }
  const SpacetimeGrid& grid() const { return phi_.grid(); }

 private:
  ScalarField phi_;
};

/// Antisymmetric matrix of scalar fields h_ij, i, j in 0..n.
class TwoFormField {
 public:
  TwoFormField() = default;
  /// Built from the strictly upper entries h_ij (i < j); the rest follows by antisymmetry.
  TwoFormField(const SpacetimeGrid& grid, int dim, std::vector<ScalarField> upper);

  int dim() const { return dim_; }
  const SpacetimeGrid& grid() const { return grid_; }
  double value(int i, int j, std::size_t node) const;
  /// Closed-form entry if available; empty field otherwise.
  AnalyticField analytic(int i, int j) const;
  bool has_analytic() const;
  const ScalarField& upper(int i, int j) const { return upper_[pair_index(i, j)]; }

 private:
  int pair_index(int i, int j) const;
  SpacetimeGrid grid_;
  int dim_ = 0;
  std::vector<ScalarField> upper_;
};

}  // namespace lrlab
