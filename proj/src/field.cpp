#include "lrlab/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lrlab/error.hpp"

namespace lrlab {

template <class T>
BasicScalarField<T>::BasicScalarField(SpacetimeGrid grid, std::vector<T> samples)
    : grid_(std::move(grid)) {
  require(samples.size() == grid_.size(), ErrorCode::GridMismatch,
          "sample count " + std::to_string(samples.size()) + " does not match grid size " +
              std::to_string(grid_.size()));
  data_ = std::make_shared<const std::vector<T>>(std::move(samples));
}

template <class T>
double BasicScalarField<T>::max_abs() const {
  double m = 0.0;
  if (!data_) return m;
  for (const T& v : *data_) m = std::max(m, static_cast<double>(std::abs(v)));
  return m;
}

template class BasicScalarField<double>;
template class BasicScalarField<cplx>;

ScalarField sample(const SpacetimeGrid& grid, const AnalyticField& f) {
  require(f.dim() == grid.dim(), ErrorCode::GridMismatch, "analytic field dimension differs from grid");
  std::vector<double> s(grid.size(), 0.0);
  const auto supp = f.support();
  const long long n = static_cast<long long>(grid.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    const Point p = grid.node(static_cast<std::size_t>(i));
    if (supp && !supp->contains(p)) continue;
    s[static_cast<std::size_t>(i)] = f.value(p);
  }
  return ScalarField(grid, std::move(s)).with_analytic(f);
}

template <class T>
double boundary_layer_max(const BasicScalarField<T>& u, int layers) {
  const auto& g = u.grid();
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.boundary_distance(g.unravel(i)) < layers) m = std::max(m, static_cast<double>(std::abs(u[i])));
  return m;
}

template double boundary_layer_max(const BasicScalarField<double>&, int);
template double boundary_layer_max(const BasicScalarField<cplx>&, int);

CovectorField::CovectorField(std::vector<ScalarField> components, bool require_compact)
    : comps_(std::move(components)) {
  require(!comps_.empty(), ErrorCode::InvalidArgument, "covector field needs components");
  const auto& g = comps_.front().grid();
  require(static_cast<int>(comps_.size()) == g.dim(), ErrorCode::GridMismatch,
          "covector field needs 1 + n components");
  for (const auto& c : comps_) require_same_grid(g, c.grid(), "CovectorField");
  if (require_compact) {
    for (std::size_t k = 0; k < comps_.size(); ++k) {
      const double edge = boundary_layer_max(comps_[k], 2);
      require(edge <= 1e-12 * std::max(1.0, comps_[k].max_abs()), ErrorCode::SupportViolation,
              "covector component " + std::to_string(k) + " does not vanish on the 2-cell margin (max " +
                  std::to_string(edge) + ")");
    }
  }
}

CovectorField CovectorField::zeros(const SpacetimeGrid& grid) {
  std::vector<ScalarField> c;
  for (int a = 0; a < grid.dim(); ++a) c.push_back(sample(grid, AnalyticField::zero(grid.dim())));
  return CovectorField(std::move(c));
}

CovectorField CovectorField::from_analytic(const SpacetimeGrid& grid,
                                           const std::vector<AnalyticField>& comps) {
  std::vector<ScalarField> c;
  for (const auto& f : comps) c.push_back(sample(grid, f));
  return CovectorField(std::move(c));
}

bool CovectorField::has_analytic() const {
  return std::all_of(comps_.begin(), comps_.end(), [](const ScalarField& c) { return c.has_analytic(); });
}

std::optional<Box> CovectorField::support() const {
  if (!has_analytic()) return std::nullopt;
  std::optional<Box> acc;
  for (const auto& c : comps_) {
    auto s = c.analytic().support();
    if (!s) return std::nullopt;
    if (s->empty()) continue;
    acc = acc ? Box::merge(*acc, *s) : *s;
  }
  if (!acc) {
    Box e;
    e.dim = grid().dim();
    e.lo.fill(1.0);
    e.hi.fill(0.0);
    return e;
  }
  acc->dim = grid().dim();
  return acc;
}

GaugeFunction::GaugeFunction(ScalarField phi) : phi_(std::move(phi)) {
  const double edge = boundary_layer_max(phi_, 2);
  require(edge <= 1e-12, ErrorCode::SupportViolation,
          "gauge function does not vanish near the boundary of Q (max " + std::to_string(edge) + ")");
  if (phi_.has_analytic()) {
    const auto& g = phi_.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.boundary_distance(g.unravel(i)) != 0) continue;
      const Jet j = phi_.analytic().eval(g.node(i), 1);
      for (int a = 0; a < g.dim(); ++a)
        require(std::abs(j.d1[a]) <= 1e-12, ErrorCode::SupportViolation,
                "gauge function gradient does not vanish on the boundary of Q");
    }
  }
}

TwoFormField::TwoFormField(const SpacetimeGrid& grid, int dim, std::vector<ScalarField> upper)
    : grid_(grid), dim_(dim), upper_(std::move(upper)) {
  require(static_cast<int>(upper_.size()) == dim * (dim - 1) / 2, ErrorCode::InvalidArgument,
          "two-form needs dim*(dim-1)/2 upper entries");
  for (const auto& u : upper_) require_same_grid(grid_, u.grid(), "TwoFormField");
}

int TwoFormField::pair_index(int i, int j) const {
  // row-major over i < j
  return i * dim_ - i * (i + 1) / 2 + (j - i - 1);
}

double TwoFormField::value(int i, int j, std::size_t node) const {
  if (i == j) return 0.0;
  if (i < j) return upper_[pair_index(i, j)][node];
  return -upper_[pair_index(j, i)][node];
}

AnalyticField TwoFormField::analytic(int i, int j) const {
  if (i == j) return AnalyticField::zero(grid_.dim());
  if (i < j) return upper_[pair_index(i, j)].analytic();
  const auto& a = upper_[pair_index(j, i)].analytic();
  if (!a.valid()) return {};
  return -1.0 * a;
}

bool TwoFormField::has_analytic() const {
  return std::all_of(upper_.begin(), upper_.end(), [](const ScalarField& u) { return u.has_analytic(); });
}

}  // namespace lrlab
