#include "lrlab/pde.hpp"

#include <cmath>
#include <string>

#include "lrlab/error.hpp"
#include "lrlab/quadrature.hpp"

namespace lrlab {

template <class T>
BasicInitialData<T> initial_from(const SpacetimeGrid& g, const std::function<T(const Point&)>& u,
                                 const std::function<T(const Point&)>& dt_u) {
  BasicInitialData<T> d;
  d.phi.resize(g.spatial_size());
  d.psi.resize(g.spatial_size());
  for (std::size_t s = 0; s < g.spatial_size(); ++s) {
    const Point p = g.spatial_node(s);
    d.phi[s] = u(p);
    d.psi[s] = dt_u(p);
  }
  return d;
}

template <class T>
BasicDirichletData<T> dirichlet_from(const SpacetimeGrid& g, const std::function<T(const Point&)>& u) {
  BasicDirichletData<T> d;
  d.values.assign(g.size(), T{});
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.spatial_boundary_distance(g.unravel(i)) == 0) d.values[i] = u(g.node(i));
  return d;
}

int face_axis(int face) { return face / 2; }
double face_normal_sign(int face) { return (face % 2 == 0) ? -1.0 : 1.0; }

BoundaryRegions BoundaryRegions::from_direction(int n_spatial, std::vector<double> omega0) {
  require(static_cast<int>(omega0.size()) == n_spatial, ErrorCode::InvalidArgument,
          "omega0 must have n_spatial components");
  double nrm = 0.0;
  for (double w : omega0) nrm += w * w;
  require(std::abs(std::sqrt(nrm) - 1.0) < 1e-12, ErrorCode::InvalidArgument, "omega0 must be a unit vector");
  BoundaryRegions r;
  r.omega0 = std::move(omega0);
  for (int f = 0; f < 2 * n_spatial; ++f) {
    const double nu_dot = face_normal_sign(f) * r.omega0[face_axis(f)];
    r.shadowed.push_back(nu_dot >= 0.0);
    r.illuminated.push_back(nu_dot <= 0.0);
  }
  r.G = r.illuminated;
  r.F = r.shadowed;
  return r;
}

BoundaryRegions BoundaryRegions::with_G(std::vector<bool> g) const {
  require(g.size() == illuminated.size(), ErrorCode::MaskOutOfRange, "G mask has the wrong face count");
  for (std::size_t f = 0; f < g.size(); ++f)
    require(!illuminated[f] || g[f], ErrorCode::MaskOutOfRange,
            "G must contain every illuminated face (face " + std::to_string(f) + " missing)");
  BoundaryRegions r = *this;
  r.G = std::move(g);
  return r;
}

double cfl_number(const SpacetimeGrid& grid) {
  return grid.dt() * std::sqrt(static_cast<double>(grid.n_spatial())) / grid.min_dx();
}

namespace {

template <class T>
bool finite(const T& v) {
  if constexpr (std::is_same_v<T, double>)
    return std::isfinite(v);
  else
    return std::isfinite(v.real()) && std::isfinite(v.imag());
}

}  // namespace

template <class T>
BasicWaveState<T> solve_ibvp(const CovectorField& A, const ScalarField& q,
                             const BasicInitialData<T>& init, const BasicDirichletData<T>& f,
                             const SpacetimeGrid& grid, const std::vector<T>* source) {
  require_same_grid(grid, A.grid(), "solve_ibvp(A)");
  require_same_grid(grid, q.grid(), "solve_ibvp(q)");
  const std::size_t S = grid.spatial_size();
  require(init.phi.size() == S && init.psi.size() == S, ErrorCode::GridMismatch,
          "initial data does not match the spatial grid");
  require(f.values.size() == grid.size(), ErrorCode::GridMismatch, "Dirichlet data does not match the grid");
  require(!source || source->size() == grid.size(), ErrorCode::GridMismatch, "source does not match the grid");
  const double cfl = cfl_number(grid);
  if (cfl > 0.9)
    fail(ErrorCode::CflViolation, "CFL number " + std::to_string(cfl) + " exceeds 0.9");

  const int n = grid.n_spatial();
  const int nt = grid.n_t();
  const double dt = grid.dt();
  const ScalarField qt = effective_potential(A, q);

  std::vector<char> interior(S);
  for (std::size_t s = 0; s < S; ++s) interior[s] = grid.spatial_boundary_distance(grid.unravel_spatial(s)) > 0;

  for (std::size_t s = 0; s < S; ++s)
    if (!interior[s] && std::abs(init.phi[s] - f.values[s]) > 1e-10)
      fail(ErrorCode::PreconditionViolation, "initial data incompatible with Dirichlet data at t = 0");

  std::array<std::size_t, 3> st{};
  std::array<double, 3> inv_dx2{}, inv_2dx{};
  for (int k = 0; k < n; ++k) {
    st[k] = grid.stride(k + 1);
    inv_dx2[k] = 1.0 / (grid.dx(k) * grid.dx(k));
    inv_2dx[k] = 0.5 / grid.dx(k);
  }

  BasicWaveState<T> out;
  out.grid = grid;
  out.cfl = cfl;
  out.u.assign(grid.size(), T{});
  T* u = out.u.data();
  for (std::size_t s = 0; s < S; ++s) u[s] = interior[s] ? init.phi[s] : f.values[s];

  // spatial operator Δu + 2A·∇u − q̃u at time level `lev`, spatial node s (interior only)
  auto spatial_op = [&](const T* ul, std::size_t lev, std::size_t s) {
    const std::size_t gi = lev * S + s;
    T lap{}, adv{};
    for (int k = 0; k < n; ++k) {
      const T up = ul[s + st[k]], dn = ul[s - st[k]];
      lap += (up - 2.0 * ul[s] + dn) * inv_dx2[k];
      adv += A[k + 1][gi] * ((up - dn) * inv_2dx[k]);
    }
    return lap + 2.0 * adv - qt[gi] * ul[s];
  };

  const long long SS = static_cast<long long>(S);
  // Taylor start
  {
    T* u1 = u + S;
#pragma omp parallel for schedule(static)
    for (long long si = 0; si < SS; ++si) {
      const std::size_t s = static_cast<std::size_t>(si);
      if (!interior[s]) {
        u1[s] = f.values[S + s];
        continue;
      }
      T acc = spatial_op(u, 0, s) - 2.0 * A[0][s] * init.psi[s];
      if (source) acc += (*source)[s];
      u1[s] = u[s] + dt * init.psi[s] + 0.5 * dt * dt * acc;
    }
  }
  for (int m = 1; m + 1 < nt; ++m) {
    const T* um = u + static_cast<std::size_t>(m - 1) * S;
    const T* u0 = u + static_cast<std::size_t>(m) * S;
    T* up = u + static_cast<std::size_t>(m + 1) * S;
    const std::size_t lev = static_cast<std::size_t>(m);
    bool ok = true;
#pragma omp parallel for schedule(static) reduction(&& : ok)
    for (long long si = 0; si < SS; ++si) {
      const std::size_t s = static_cast<std::size_t>(si);
      if (!interior[s]) {
        up[s] = f.values[(lev + 1) * S + s];
      } else {
        const double a0dt = A[0][lev * S + s] * dt;
        T rhs = spatial_op(u0, lev, s);
        if (source) rhs += (*source)[lev * S + s];
        up[s] = (2.0 * u0[s] - (1.0 - a0dt) * um[s] + dt * dt * rhs) / (1.0 + a0dt);
      }
      ok = ok && finite(up[s]);
    }
    if (!ok) fail(ErrorCode::NonfiniteState, "non-finite value at time step " + std::to_string(m + 1));
  }
  return out;
}

template <class T>
std::vector<FaceTrace<T>> neumann_trace(const BasicWaveState<T>& state, const std::vector<bool>& faces) {
  const auto& g = state.grid;
  const int nf = 2 * g.n_spatial();
  require(static_cast<int>(faces.size()) == nf, ErrorCode::MaskOutOfRange,
          "face mask has " + std::to_string(faces.size()) + " entries, grid has " + std::to_string(nf) + " faces");
  std::vector<FaceTrace<T>> out;
  for (int f = 0; f < nf; ++f) {
    if (!faces[f]) continue;
    const int a = face_axis(f) + 1;
    const int N = g.shape(a);
    const std::size_t st = g.stride(a);
    const bool hi = f % 2 == 1;
    const double inv = 1.0 / (2.0 * g.spacing(a));
    FaceTrace<T> tr;
    tr.face = f;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto idx = g.unravel(i);
      if (idx[a] != (hi ? N - 1 : 0)) continue;
      const T* u = state.u.data();
      if (hi)
        tr.values.push_back((3.0 * u[i] - 4.0 * u[i - st] + u[i - 2 * st]) * inv);
      else
        tr.values.push_back((3.0 * u[i] - 4.0 * u[i + st] + u[i + 2 * st]) * inv);
    }
    out.push_back(std::move(tr));
  }
  return out;
}

template <class T>
BasicLambdaData<T> lambda_from_state(const BasicWaveState<T>& state, const BoundaryRegions& region) {
  const auto& g = state.grid;
  BasicLambdaData<T> d;
  d.neumann_G = neumann_trace(state, region.G);
  const std::size_t S = g.spatial_size();
  const std::size_t N = static_cast<std::size_t>(g.n_t());
  const T* uN = state.u.data() + (N - 1) * S;
  const T* uN1 = uN - S;
  const T* uN2 = uN1 - S;
  d.final_u.assign(uN, uN + S);
  d.final_dtu.resize(S);
  for (std::size_t s = 0; s < S; ++s) d.final_dtu[s] = (3.0 * uN[s] - 4.0 * uN1[s] + uN2[s]) / (2.0 * g.dt());
  return d;
}

template <class T>
BasicLambdaData<T> input_output_map(const CovectorField& A, const ScalarField& q,
                                    const BasicInitialData<T>& init, const BasicDirichletData<T>& f,
                                    const BoundaryRegions& region) {
  return lambda_from_state(solve_ibvp(A, q, init, f, A.grid()), region);
}

double lambda_difference(const LambdaData& a, const LambdaData& b) {
  require(a.neumann_G.size() == b.neumann_G.size() && a.final_u.size() == b.final_u.size(),
          ErrorCode::GridMismatch, "LambdaData shapes differ");
  double m = 0.0;
  for (std::size_t k = 0; k < a.neumann_G.size(); ++k) {
    require(a.neumann_G[k].values.size() == b.neumann_G[k].values.size(), ErrorCode::GridMismatch,
            "LambdaData shapes differ");
    for (std::size_t i = 0; i < a.neumann_G[k].values.size(); ++i)
      m = std::max(m, std::abs(a.neumann_G[k].values[i] - b.neumann_G[k].values[i]));
  }
  for (std::size_t i = 0; i < a.final_u.size(); ++i) m = std::max(m, std::abs(a.final_u[i] - b.final_u[i]));
  return m;
}

std::vector<double> discrete_energy(const WaveState& state, const ScalarField& q) {
  // staggered form: time differences between levels m and m+1, edge differences averaged over both levels
  const auto& g = state.grid;
  const std::size_t S = g.spatial_size();
  const int n = g.n_spatial();
  const double dt = g.dt();
  std::vector<char> interior(S);
  for (std::size_t s = 0; s < S; ++s) interior[s] = g.spatial_boundary_distance(g.unravel_spatial(s)) > 0;
  std::vector<double> e;
  for (int m = 0; m + 1 < g.n_t(); ++m) {
    const double* u0 = state.u.data() + static_cast<std::size_t>(m) * S;
    const double* u1 = u0 + S;
    double acc = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      const auto idx = g.unravel_spatial(s);
      if (interior[s]) {
        const double ut = (u1[s] - u0[s]) / dt;
        acc += ut * ut + q[static_cast<std::size_t>(m) * S + s] * u0[s] * u1[s];
      }
      for (int k = 0; k < n; ++k) {
        if (idx[k + 1] + 1 >= g.n_x(k)) continue;
        const std::size_t st = g.stride(k + 1);
        const double h = g.dx(k);
        acc += (u0[s + st] - u0[s]) * (u1[s + st] - u1[s]) / (h * h);
      }
    }
    e.push_back(acc * g.spatial_cell_volume());
  }
  return e;
}

double greens_identity_residual(const CovectorField& A, const ScalarField& q, const ScalarField& u,
                                const ScalarField& v, AdjointDerivatives mode) {
  const auto& g = u.grid();
  require_same_grid(g, A.grid(), "greens_identity_residual(A)");
  require_same_grid(g, q.grid(), "greens_identity_residual(q)");
  require_same_grid(g, v.grid(), "greens_identity_residual(v)");
  const int n = g.n_spatial();
  const std::size_t S = g.spatial_size();
  const double tol = 1e-10 * std::max(1.0, u.max_abs());

  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.unravel(i);
    if (g.spatial_boundary_distance(idx) == 0 && std::abs(u[i]) > tol)
      fail(ErrorCode::PreconditionViolation, "u does not vanish on the lateral boundary");
    if (idx[0] == 0) {
      if (std::abs(u[i]) > tol) fail(ErrorCode::PreconditionViolation, "u does not vanish at t = 0");
      if (u.has_analytic() && u.analytic().max_order() >= 1 &&
          std::abs(u.analytic().eval(g.node(i), 1).d1[0]) > tol)
        fail(ErrorCode::PreconditionViolation, "∂_t u does not vanish at t = 0");
    }
  }

  const auto lay = layout_of(g);
  const ScalarField qt = effective_potential(A, q);
  const ScalarField qt_adj = effective_potential(scaled(-1.0, A), q);

  std::vector<double> Lu = fd::second(u.vec(), lay, 0, g.dt());
  {
    const auto ut = fd::partial(u.vec(), lay, 0, g.dt(), 2);
    for (std::size_t i = 0; i < g.size(); ++i) Lu[i] += 2.0 * A[0][i] * ut[i] + qt[i] * u[i];
    for (int k = 1; k <= n; ++k) {
      const auto uxx = fd::second(u.vec(), lay, k, g.spacing(k));
      const auto ux = fd::partial(u.vec(), lay, k, g.spacing(k), 2);
      for (std::size_t i = 0; i < g.size(); ++i) Lu[i] -= uxx[i] + 2.0 * A[k][i] * ux[i];
    }
  }

  const bool v_exact = mode == AdjointDerivatives::Analytic && v.has_analytic() &&
                       v.analytic().max_order() >= 2;
  std::vector<double> Lv(g.size()), vt(g.size());
  if (v_exact) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Jet j = v.analytic().eval(g.node(i), 2);
      double r = j.hess(0, 0) - 2.0 * A[0][i] * j.d1[0] + qt_adj[i] * j.v;
      for (int k = 1; k <= n; ++k) r += -j.hess(k, k) + 2.0 * A[k][i] * j.d1[k];
      Lv[i] = r;
      vt[i] = j.d1[0];
    }
  } else {
    Lv = fd::second(v.vec(), lay, 0, g.dt());
    vt = fd::partial(v.vec(), lay, 0, g.dt(), 2);
    for (std::size_t i = 0; i < g.size(); ++i) Lv[i] += -2.0 * A[0][i] * vt[i] + qt_adj[i] * v[i];
    for (int k = 1; k <= n; ++k) {
      const auto vxx = fd::second(v.vec(), lay, k, g.spacing(k));
      const auto vx = fd::partial(v.vec(), lay, k, g.spacing(k), 2);
      for (std::size_t i = 0; i < g.size(); ++i) Lv[i] += -vxx[i] + 2.0 * A[k][i] * vx[i];
    }
  }

  const auto w = quad::trapezoid_weights(g);
  double lhs = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) lhs += w[i] * (Lu[i] * v[i] - u[i] * Lv[i]);

  // final-time terms
  const auto ws = quad::spatial_trapezoid_weights(g);
  const std::size_t N = static_cast<std::size_t>(g.n_t());
  double top = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    const std::size_t i = (N - 1) * S + s;
    const double ut = (3.0 * u[i] - 4.0 * u[i - S] + u[i - 2 * S]) / (2.0 * g.dt());
    top += ws[s] * (ut * v[i] - u[i] * vt[i]);
  }

  // lateral flux ∫_Σ ∂_ν u v
  WaveState st{g, u.vec(), 0.0};
  std::vector<bool> all(2 * n, true);
  const auto traces = neumann_trace(st, all);
  double flux = 0.0;
  for (const auto& tr : traces) {
    const int a = face_axis(tr.face) + 1;
    const bool hi = tr.face % 2 == 1;
    std::size_t k = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto idx = g.unravel(i);
      if (idx[a] != (hi ? g.shape(a) - 1 : 0)) continue;
      double wt = 1.0;
      for (int b = 0; b < g.dim(); ++b)
        if (b != a) wt *= quad::trap_weight(idx[b], g.shape(b), g.spacing(b));
      flux += wt * tr.values[k++] * v[i];
    }
  }
  return std::abs(lhs - (top - flux));
}

GaugeCheckReport gauge_equivalence_check(const CovectorField& A, const ScalarField& q,
                                         const GaugeFunction& phi, const Probe& probe,
                                         const BoundaryRegions& region, bool refine) {
  auto run = [&](const SpacetimeGrid& g, double& du, double& dl) {
    const CovectorField A1 = g == A.grid() ? A : resample(A, g);
    const ScalarField q1 = g == q.grid() ? q : resample(q, g);
    const GaugeFunction ph = g == phi.grid() ? phi : resample(phi, g);
    const CovectorField A2 = gauge_transform(A1, ph);
    const auto init = initial_from<double>(g, probe.u, probe.dt_u);
    const auto f = dirichlet_from<double>(g, probe.u);
    const auto s1 = solve_ibvp(A1, q1, init, f, g);
    const auto s2 = solve_ibvp(A2, q1, init, f, g);
    du = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      du = std::max(du, std::abs(s2.u[i] - std::exp(-ph.phi()[i]) * s1.u[i]));
    dl = lambda_difference(lambda_from_state(s1, region), lambda_from_state(s2, region));
  };
  GaugeCheckReport r;
  run(A.grid(), r.u_discrepancy, r.lambda_discrepancy);
  if (refine) {
    run(A.grid().refined(2), r.u_discrepancy_fine, r.lambda_discrepancy_fine);
    auto order = [](double c, double f) { return (c > 0 && f > 0) ? std::log2(c / f) : 0.0; };
    r.u_order = order(r.u_discrepancy, r.u_discrepancy_fine);
    r.lambda_order = order(r.lambda_discrepancy, r.lambda_discrepancy_fine);
  }
  return r;
}

template BasicInitialData<double> initial_from(const SpacetimeGrid&, const std::function<double(const Point&)>&,
                                               const std::function<double(const Point&)>&);
template BasicInitialData<cplx> initial_from(const SpacetimeGrid&, const std::function<cplx(const Point&)>&,
                                             const std::function<cplx(const Point&)>&);
template BasicDirichletData<double> dirichlet_from(const SpacetimeGrid&, const std::function<double(const Point&)>&);
template BasicDirichletData<cplx> dirichlet_from(const SpacetimeGrid&, const std::function<cplx(const Point&)>&);
template BasicWaveState<double> solve_ibvp(const CovectorField&, const ScalarField&, const BasicInitialData<double>&,
                                           const BasicDirichletData<double>&, const SpacetimeGrid&,
                                           const std::vector<double>*);
template BasicWaveState<cplx> solve_ibvp(const CovectorField&, const ScalarField&, const BasicInitialData<cplx>&,
                                         const BasicDirichletData<cplx>&, const SpacetimeGrid&,
                                         const std::vector<cplx>*);
template std::vector<FaceTrace<double>> neumann_trace(const BasicWaveState<double>&, const std::vector<bool>&);
template std::vector<FaceTrace<cplx>> neumann_trace(const BasicWaveState<cplx>&, const std::vector<bool>&);
template BasicLambdaData<double> lambda_from_state(const BasicWaveState<double>&, const BoundaryRegions&);
template BasicLambdaData<cplx> lambda_from_state(const BasicWaveState<cplx>&, const BoundaryRegions&);
template BasicLambdaData<double> input_output_map(const CovectorField&, const ScalarField&,
                                                  const BasicInitialData<double>&,
                                                  const BasicDirichletData<double>&, const BoundaryRegions&);

}  // namespace lrlab
