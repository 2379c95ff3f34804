#include "lrlab/fields.hpp"

#include <cmath>
#include <string>

#include "lrlab/error.hpp"

namespace lrlab {

fd::Layout layout_of(const SpacetimeGrid& grid) {
  std::array<int, kMaxDim> shape{};
  for (int a = 0; a < grid.dim(); ++a) shape[a] = grid.shape(a);
  return fd::Layout::row_major(grid.dim(), shape);
}

void check_bump_margin(const BumpSpec& spec, const SpacetimeGrid& grid) {
  for (int a = 0; a < grid.dim(); ++a) {
    const double lo = grid.origin(a) + 2.0 * grid.spacing(a);
    const double hi = grid.upper(a) - 2.0 * grid.spacing(a);
    const double tol = 1e-12 * (grid.upper(a) - grid.origin(a));
    if (spec.center[a] - spec.radii[a] < lo - tol || spec.center[a] + spec.radii[a] > hi + tol)
      fail(ErrorCode::SupportViolation,
           "bump support on axis " + std::to_string(a) + " reaches the 2-cell margin of Q");
  }
}

ScalarField make_bump(const BumpSpec& spec, const SpacetimeGrid& grid) {
  return make_bumps({spec}, grid);
}

ScalarField make_bumps(const std::vector<BumpSpec>& specs, const SpacetimeGrid& grid) {
  for (const auto& s : specs)
    if (s.amplitude != 0.0) check_bump_margin(s, grid);
  return sample(grid, bump_field(grid.dim(), specs));
}

ScalarField partial(const ScalarField& u, int axis) {
  const auto& g = u.grid();
  require(axis >= 0 && axis < g.dim(), ErrorCode::InvalidArgument, "partial: axis out of range");
  if (u.has_analytic() && u.analytic().max_order() >= 1) return sample(g, u.analytic().partial(axis));
  return ScalarField(g, fd::partial(u.vec(), layout_of(g), axis, g.spacing(axis), 4));
}

std::vector<ScalarField> gradient_components(const ScalarField& u) {
  std::vector<ScalarField> c;
  for (int a = 0; a < u.grid().dim(); ++a) c.push_back(partial(u, a));
  return c;
}

CovectorField gradient_tx(const GaugeFunction& phi) {
  return CovectorField(gradient_components(phi.phi()));
}

ScalarField linear_combination(double a, const ScalarField& u, double b, const ScalarField& v) {
  require_same_grid(u.grid(), v.grid(), "linear_combination");
  std::vector<double> s(u.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = a * u[i] + b * v[i];
  ScalarField r(u.grid(), std::move(s));
  if (u.has_analytic() && v.has_analytic()) r = r.with_analytic(a * u.analytic() + b * v.analytic());
  return r;
}

ScalarField scaled(double a, const ScalarField& u) {
  std::vector<double> s(u.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = a * u[i];
  ScalarField r(u.grid(), std::move(s));
  if (u.has_analytic()) r = r.with_analytic(a * u.analytic());
  return r;
}

CovectorField scaled(double a, const CovectorField& A) {
  std::vector<ScalarField> c;
  for (const auto& comp : A.components()) c.push_back(scaled(a, comp));
  return CovectorField(std::move(c));
}

CovectorField add(const CovectorField& A, const CovectorField& B) {
  require_same_grid(A.grid(), B.grid(), "add");
  std::vector<ScalarField> c;
  for (int k = 0; k < A.size(); ++k) c.push_back(linear_combination(1.0, A[k], 1.0, B[k]));
  return CovectorField(std::move(c));
}

CovectorField gauge_transform(const CovectorField& A, const GaugeFunction& phi) {
  require_same_grid(A.grid(), phi.grid(), "gauge_transform");
  return add(A, gradient_tx(phi));
}

ScalarField effective_potential(const CovectorField& A, const ScalarField& q) {
  require_same_grid(A.grid(), q.grid(), "effective_potential");
  const auto& g = A.grid();
  const int n = g.n_spatial();
  bool analytic = q.has_analytic() && A.has_analytic();
  for (int k = 0; analytic && k <= n; ++k) analytic = A[k].analytic().max_order() >= 1;
  if (analytic) {
    AnalyticField f = q.analytic() + A[0].analytic().partial(0) + A[0].analytic() * A[0].analytic();
    for (int j = 1; j <= n; ++j)
      f = f - A[j].analytic().partial(j) - A[j].analytic() * A[j].analytic();
    return sample(g, f);
  }
  const ScalarField dtA0 = partial(A[0], 0);
  std::vector<double> s(g.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = q[i] + dtA0[i] + A[0][i] * A[0][i];
  for (int j = 1; j <= n; ++j) {
    const ScalarField djAj = partial(A[j], j);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] -= djAj[i] + A[j][i] * A[j][i];
  }
  return ScalarField(g, std::move(s));
}

TwoFormField exterior_derivative(const CovectorField& F) {
  const int d = F.size();
  std::vector<ScalarField> upper;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const auto& Fi = F[i];
      const auto& Fj = F[j];
      if (Fi.has_analytic() && Fj.has_analytic() && Fi.analytic().max_order() >= 1 &&
          Fj.analytic().max_order() >= 1) {
        upper.push_back(sample(F.grid(), Fi.analytic().partial(j) - Fj.analytic().partial(i)));
      } else {
        upper.push_back(linear_combination(1.0, partial(Fi, j), -1.0, partial(Fj, i)));
      }
    }
  return TwoFormField(F.grid(), d, std::move(upper));
}

template <class T>
T interpolate(const BasicScalarField<T>& u, const Point& p) {
  const auto& g = u.grid();
  const int d = g.dim();
  std::array<int, kMaxDim> i0{};
  std::array<double, kMaxDim> w{};
  for (int a = 0; a < d; ++a) {
    const double x = (p[a] - g.origin(a)) / g.spacing(a);
    const int n = g.shape(a);
    if (x < -1e-12 || x > (n - 1) + 1e-12) return T{};
    int i = static_cast<int>(std::floor(x));
    i = std::clamp(i, 0, n - 2);
    i0[a] = i;
    w[a] = std::clamp(x - i, 0.0, 1.0);
  }
  T acc{};
  const int corners = 1 << d;
  for (int c = 0; c < corners; ++c) {
    double wt = 1.0;
    std::size_t f = 0;
    for (int a = 0; a < d; ++a) {
      const int bit = (c >> a) & 1;
      wt *= bit ? w[a] : 1.0 - w[a];
      f += static_cast<std::size_t>(i0[a] + bit) * g.stride(a);
    }
    if (wt != 0.0) acc += wt * u[f];
  }
  return acc;
}

template double interpolate(const BasicScalarField<double>&, const Point&);
template cplx interpolate(const BasicScalarField<cplx>&, const Point&);

double evaluate(const ScalarField& u, const Point& p) {
  if (u.has_analytic()) return u.analytic().value(p);
  return interpolate(u, p);
}

ScalarField resample(const ScalarField& u, const SpacetimeGrid& target) {
  require(target.dim() == u.grid().dim(), ErrorCode::GridMismatch, "resample: dimension mismatch");
  if (u.has_analytic()) return sample(target, u.analytic());
  std::vector<double> s(target.size());
  const long long n = static_cast<long long>(target.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i)
    s[static_cast<std::size_t>(i)] = interpolate(u, target.node(static_cast<std::size_t>(i)));
  return ScalarField(target, std::move(s));
}

CovectorField resample(const CovectorField& A, const SpacetimeGrid& target) {
  std::vector<ScalarField> c;
  for (const auto& comp : A.components()) c.push_back(resample(comp, target));
  return CovectorField(std::move(c));
}

GaugeFunction resample(const GaugeFunction& phi, const SpacetimeGrid& target) {
  return GaugeFunction(resample(phi.phi(), target));
}

}  // namespace lrlab
