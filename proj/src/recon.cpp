#include "lrlab/recon.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "lrlab/error.hpp"
#include "lrlab/fields.hpp"
#include "lrlab/finite_difference.hpp"
#include "lrlab/go.hpp"
#include "lrlab/quadrature.hpp"
#include "lrlab/rays.hpp"

namespace lrlab {

namespace {

Box support_or_grid(const CovectorField& F) {
  auto s = F.support();
  if (s && !s->empty()) {
    s->dim = F.grid().dim();
    return *s;
  }
  return RayIntegrator(F).support();
}

std::vector<int> grid_shape(const SpacetimeGrid& g) {
  std::vector<int> s(g.dim());
  for (int a = 0; a < g.dim(); ++a) s[a] = g.shape(a);
  return s;
}

double l2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

/// Alternating projections between {spectrum = data on the known set} and {real, zero off the mask}.
/// `known` holds DFT-normalized values; the misfit is measured in the unitary normalization.
PocsResult pocs(const SpacetimeGrid& grid, const FFT& fft, const std::vector<std::pair<std::size_t, cplx>>& known,
                const std::vector<bool>& mask, const PocsOptions& opt) {
  require(opt.max_iter >= 1, ErrorCode::InvalidArgument, "POCS needs max_iter >= 1");
  require(opt.tol > 0.0, ErrorCode::InvalidArgument, "POCS tolerance must be positive");
  require(opt.relaxation > 0.0 && opt.relaxation <= 1.0, ErrorCode::InvalidArgument,
          "POCS relaxation must lie in (0, 1]");
  const std::size_t N = grid.size();
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(N));
  double data_norm = 0.0;
  for (const auto& [k, v] : known) data_norm += std::norm(v);
  data_norm = std::sqrt(data_norm) * inv_sqrt_n;

  std::vector<double> x(N, 0.0), xn(N);
  std::vector<cplx> X(N);
  PocsResult res;
  double prev = INFINITY;
  for (int it = 1; it <= opt.max_iter; ++it) {
    for (std::size_t i = 0; i < N; ++i) X[i] = x[i];
    fft.forward(X);
    double mis = 0.0;
    for (const auto& [k, v] : known) {
      mis += std::norm(X[k] - v);
      X[k] = v;
    }
    mis = std::sqrt(mis) * inv_sqrt_n;
    require(mis <= prev * (1.0 + 1e-9) + 1e-13 * data_norm, ErrorCode::AssertionFailed,
            "cone misfit increased at iteration " + std::to_string(it));
    prev = mis;
    fft.backward(X);
    double leak = 0.0, all = 0.0, inc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const cplx y = X[i] / static_cast<double>(N);
      all += std::norm(y);
      if (!mask[i]) leak += std::norm(y);
      const double proj = mask[i] ? y.real() : 0.0;
      xn[i] = x[i] + opt.relaxation * (proj - x[i]);
      inc += (xn[i] - x[i]) * (xn[i] - x[i]);
    }
    x.swap(xn);
    const double nx = l2(x);
    const double increment = nx > 0.0 ? std::sqrt(inc) / nx : std::sqrt(inc);
    res.log.push_back({it, mis, all > 0.0 ? std::sqrt(leak / all) : 0.0, increment});
    if (increment < opt.tol) {
      res.converged = true;
      break;
    }
  }
  res.field = ScalarField(grid, std::move(x));
  return res;
}

}  // namespace

LineIntegralRayData::LineIntegralRayData(const CovectorField& F, double spacing)
    : F_(F), h_(exterior_derivative(F)), support_(support_or_grid(F)), spacing_(spacing) {}

ConeSamples LineIntegralRayData::transverse(const Point& zeta, const std::vector<Direction>& dirs) const {
  ConeSamples out;
  for (const auto& d : dirs) {
    const auto frame = HyperplaneFrame::make(d, support_, spacing_);
    auto s = transverse_slice(h_, frame, {zeta});
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

FieldSpectrumRayData::FieldSpectrumRayData(const CovectorField& F) : lattice_(F.grid()) {
  const auto& g = F.grid();
  const FFT fft(grid_shape(g));
  const auto h = exterior_derivative(F);
  for (int i = 0; i < g.dim(); ++i)
    for (int j = i + 1; j < g.dim(); ++j) {
      const auto& c = h.upper(i, j).vec();
      std::vector<cplx> s(c.begin(), c.end());
      fft.forward(s);
      for (std::size_t k = 0; k < s.size(); ++k) s[k] *= lattice_.to_continuous(k);
      spectrum_.push_back(std::move(s));
    }
}

ConeSamples FieldSpectrumRayData::transverse(const Point& zeta, const std::vector<Direction>& dirs) const {
  const auto idx = lattice_.index_of(zeta);
  require(idx >= 0, ErrorCode::InvalidArgument, "spectral ray data is only available on the grid's frequency lattice");
  const int dim = lattice_.grid().dim();
  Eigen::MatrixXcd hh = Eigen::MatrixXcd::Zero(dim, dim);
  int p = 0;
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      hh(i, j) = spectrum_[p][idx];
      hh(j, i) = -spectrum_[p++][idx];
    }
  ConeSamples out;
  for (const auto& d : dirs) {
    const Point wt = d.spacetime(1.0);
    for (int j = 0; j < dim; ++j) {
      cplx v{};
      for (int i = 0; i < dim; ++i) v += wt[i] * hh(i, j);
      out.push_back({zeta, d.omega, j, v});
    }
  }
  return out;
}

std::vector<bool> support_mask(const SpacetimeGrid& grid, const Box& box) {
  for (int a = 0; a < grid.dim(); ++a)
    require(box.lo[a] >= grid.origin(a) + 2 * grid.spacing(a) - 1e-12 &&
                box.hi[a] <= grid.upper(a) - 2 * grid.spacing(a) + 1e-12,
            ErrorCode::MaskOutOfRange, "support mask must stay two cells inside Q on axis " + std::to_string(a));
  Box b = box;
  b.dim = grid.dim();
  std::vector<bool> m(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) m[i] = b.contains(grid.node(i), 1e-12);
  return m;
}

std::vector<std::size_t> spacelike_indices(const SpectralLattice& lattice, double margin) {
  std::vector<std::size_t> out;
  const int dim = lattice.grid().dim();
  for (std::size_t i = 0; i < lattice.grid().size(); ++i) {
    const Point z = lattice.zeta(i);
    double xi = 0.0;
    for (int a = 1; a < dim; ++a) xi += z[a] * z[a];
    xi = std::sqrt(xi);
    if (xi > 0.0 && std::abs(z[0]) <= margin * xi) out.push_back(i);
  }
  return out;
}

CurvatureResult recover_curvature(const RayDataProvider& data, const std::vector<bool>& mask,
                                  const ReconConfig& config) {
  const auto& g = data.grid();
  require(mask.size() == g.size(), ErrorCode::GridMismatch, "support mask does not match the grid");
  const int dim = g.dim(), n = g.n_spatial();
  require(config.spacelike_margin > 0.0 && config.spacelike_margin < 1.0, ErrorCode::InvalidArgument,
          "space-like margin must lie in (0, 1)");
  const SpectralLattice lattice(g);
  const auto S = spacelike_indices(lattice, config.spacelike_margin);
  require(!S.empty(), ErrorCode::InsufficientDirections, "the frequency lattice has no space-like points");

  const int pairs = dim * (dim - 1) / 2;
  std::vector<std::vector<std::pair<std::size_t, cplx>>> known(pairs, std::vector<std::pair<std::size_t, cplx>>(S.size()));
  std::vector<double> cond(S.size()), asym(S.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(S.size()); ++s) {
    const std::size_t idx = S[s];
    const Point z = lattice.zeta(idx);
    const auto dirs = hhat_directions(z, n, config.tilt_angles);
    const auto sol = solve_hhat_system(data.transverse(z, dirs), z, n);
    cond[s] = sol.condition;
    asym[s] = sol.asymmetry;
    const cplx c = lattice.to_continuous(idx);
    int p = 0;
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j) known[p++][s] = {idx, sol.h(i, j) / c};
  }
  CurvatureResult out;
  out.spacelike_count = static_cast<int>(S.size());
  for (std::size_t s = 0; s < S.size(); ++s) {
    out.max_condition = std::max(out.max_condition, cond[s]);
    out.max_asymmetry = std::max(out.max_asymmetry, asym[s]);
  }
  const FFT fft(grid_shape(g));
  std::vector<ScalarField> upper;
  double worst = -1.0;
  for (int p = 0; p < pairs; ++p) {
    auto r = pocs(g, fft, known[p], mask, config.pocs);
    out.converged = out.converged && r.converged;
    if (r.log.back().cone_misfit > worst) {
      worst = r.log.back().cone_misfit;
      out.worst_log = r.log;
    }
    upper.push_back(r.field);
  }
  out.h = TwoFormField(g, dim, std::move(upper));
  return out;
}

GaugeFunction poincare_integrate(const CovectorField& F, std::optional<Point> origin, std::vector<int> order) {
  const auto& g = F.grid();
  const int dim = g.dim();
  if (order.empty()) {
    order.resize(dim);
    std::iota(order.begin(), order.end(), 0);
  }
  {
    std::vector<int> chk(order);
    std::sort(chk.begin(), chk.end());
    for (int a = 0; a < dim; ++a)
      require(static_cast<int>(chk.size()) == dim && chk[a] == a, ErrorCode::InvalidArgument,
              "axis order must be a permutation of the spacetime axes");
  }
  const auto h = exterior_derivative(F);
  double curl = 0.0, scale = 0.0;
  for (int i = 0; i < dim; ++i) {
    for (int a = 0; a < dim; ++a) scale = std::max(scale, partial(F[i], a).max_abs());
    for (int j = i + 1; j < dim; ++j) curl = std::max(curl, h.upper(i, j).max_abs());
  }
  require(curl <= 1e-2 * scale || scale == 0.0, ErrorCode::NotClosed,
          "1-form is not closed: sup|dF| = " + std::to_string(curl) + " against derivative scale " +
              std::to_string(scale));

  Point o{};
  if (origin) {
    o = *origin;
  } else {
    for (int a = 0; a < dim; ++a) o[a] = g.origin(a);
  }
  const RayIntegrator rays(F);
  const Box supp = rays.support();
  require(supp.empty() || !supp.contains(o), ErrorCode::OriginInsideSupport,
          "path origin lies inside the support of the 1-form");

  std::vector<double> phi(g.size(), 0.0);
  for (int step = 0; step < dim; ++step) {
    const int ax = order[step];
    // prefix grid over the axes already moved plus the current one
    std::size_t count = 1;
    for (int s = 0; s <= step; ++s) count *= g.shape(order[s]);
    std::vector<double> seg(count);
    const std::size_t outer = count / g.shape(ax);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(outer); ++r) {
      Point p = o;
      std::size_t rem = r;
      for (int s = step - 1; s >= 0; --s) {
        const int b = order[s];
        p[b] = g.coord(b, static_cast<int>(rem % g.shape(b)));
        rem /= g.shape(b);
      }
      Point e{};
      e[ax] = 1.0;
      Point start = p;
      start[ax] = o[ax];
      const double x0 = g.coord(ax, 0);
      double acc = (x0 >= o[ax] ? 1.0 : -1.0) *
                   rays.integrate(start, e, e, std::min(0.0, x0 - o[ax]), std::max(0.0, x0 - o[ax])).value;
      for (int k = 0; k < g.shape(ax); ++k) {
        if (k > 0) {
          Point a = p;
          a[ax] = g.coord(ax, k - 1);
          acc += rays.integrate(a, e, e, 0.0, g.spacing(ax)).value;
        }
        seg[static_cast<std::size_t>(r) * g.shape(ax) + k] = acc;
      }
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto idx = g.unravel(i);
      std::size_t f = 0;
      for (int s = 0; s <= step; ++s) f = f * g.shape(order[s]) + idx[order[s]];
      phi[i] += seg[f];
    }
  }
  if (!supp.empty()) {
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!supp.contains(g.node(i), 1e-12)) phi[i] = 0.0;
  } else {
    std::fill(phi.begin(), phi.end(), 0.0);
  }
  return GaugeFunction(ScalarField(g, std::move(phi)));
}

PocsResult recover_q(const ConeSamples& cone, const SpacetimeGrid& grid, const std::vector<bool>& mask,
                     const ReconConfig& config) {
  require(!cone.empty(), ErrorCode::EmptyCone, "no cone data supplied");
  require(mask.size() == grid.size(), ErrorCode::GridMismatch, "support mask does not match the grid");
  const SpectralLattice lattice(grid);
  std::vector<std::pair<std::size_t, cplx>> known;
  for (const auto& s : cone) {
    const auto idx = lattice.index_of(s.zeta);
    require(idx >= 0, ErrorCode::InvalidArgument, "cone frequency is not on the grid's frequency lattice");
    known.emplace_back(static_cast<std::size_t>(idx), s.value / lattice.to_continuous(idx));
  }
  const FFT fft(grid_shape(grid));
  return pocs(grid, fft, known, mask, config.pocs);
}

ConeSamples spectral_cone_data(const ScalarField& q, double margin) {
  const auto& g = q.grid();
  const SpectralLattice lattice(g);
  const FFT fft(grid_shape(g));
  std::vector<cplx> s(q.vec().begin(), q.vec().end());
  fft.forward(s);
  ConeSamples out;
  for (auto i : spacelike_indices(lattice, margin)) out.push_back({lattice.zeta(i), {}, -1, s[i] * lattice.to_continuous(i)});
  return out;
}

PairingTrend extract_raydata_from_lambda(const PairingSetup& setup, const std::vector<double>& h_grid) {
  const auto& g = setup.A1.grid();
  require_same_grid(g, setup.A2.grid(), "extract_raydata_from_lambda");
  require_same_grid(g, setup.q.grid(), "extract_raydata_from_lambda");
  require(g.n_spatial() <= 2, ErrorCode::InvalidArgument, "the pairing demo is limited to n <= 2");
  require(h_grid.size() >= 2, ErrorCode::InvalidArgument, "need at least two values of h");
  require(setup.A1.has_analytic() && setup.A2.has_analytic() && setup.q.has_analytic(), ErrorCode::PreconditionViolation,
          "the pairing demo needs closed-form coefficients");
  const int dim = g.dim();
  const auto query = SliceQuery::make(setup.omega, setup.zeta);
  const auto Bg = amplitude_growing(setup.A2, query);
  const auto Bd = amplitude_decaying(setup.A1, setup.omega);

  std::vector<ScalarField> dA;
  for (int a = 0; a < dim; ++a) dA.push_back(linear_combination(1.0, setup.A2[a], -1.0, setup.A1[a]));
  const ScalarField qt = linear_combination(1.0, effective_potential(setup.A2, setup.q), -1.0,
                                            effective_potential(setup.A1, setup.q));
  const auto w = quad::trapezoid_weights(g);
  std::vector<double> contract(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double c = dA[0][i];
    for (int k = 1; k < dim; ++k) c -= setup.omega.omega[k - 1] * dA[k][i];
    contract[i] = c;
  }
  PairingTrend out;
  for (std::size_t i = 0; i < g.size(); ++i) out.target += w[i] * contract[i] * Bg.B()[i] * std::conj(Bd.B()[i]);

  std::vector<double> hs(h_grid);
  std::sort(hs.begin(), hs.end(), std::greater<>());
  for (double h : hs) {
    require(h > 0.0 && h <= 1.0, ErrorCode::InvalidH, "h must lie in (0, 1]");
    // w = e^{−φ/h}u₂ solves the problem with A₂ + (1, ω)/h
    std::vector<ScalarField> shifted;
    for (int a = 0; a < dim; ++a) {
      const double c = (a == 0 ? 1.0 : setup.omega.omega[a - 1]) / h;
      const AnalyticField f = setup.A2[a].analytic() + AnalyticField::constant(dim, c);
      std::vector<double> s(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) s[i] = setup.A2[a][i] + c;
      shifted.push_back(ScalarField(g, std::move(s)).with_analytic(f));
    }
    const CovectorField Ah(shifted, false);
    const std::function<cplx(const Point&)> val = [&](const Point& p) { return Bg.jet(p, 0).v; };
    const std::function<cplx(const Point&)> dtv = [&](const Point& p) { return Bg.jet(p, 1).d1[0]; };
    const auto init = initial_from<cplx>(g, val, dtv);
    const auto bc = dirichlet_from<cplx>(g, val);
    const auto st = solve_ibvp<cplx>(Ah, setup.q, init, bc, g);
    const auto lay = layout_of(g);
    std::vector<std::vector<cplx>> d(dim);
    for (int a = 0; a < dim; ++a) d[a] = fd::partial<cplx>(st.u, lay, a, g.spacing(a), 2);
    cplx acc{};
    for (std::size_t i = 0; i < g.size(); ++i) {
      cplx lower = 2.0 * dA[0][i] * d[0][i] + qt[i] * st.u[i];
      for (int k = 1; k < dim; ++k) lower -= 2.0 * dA[k][i] * d[k][i];
      acc += w[i] * (contract[i] * st.u[i] + 0.5 * h * lower) * std::conj(Bd.B()[i]);
    }
    out.h.push_back(h);
    out.pairing.push_back(acc);
  }
  const std::size_t m = out.h.size();
  const double h1 = out.h[m - 2], h2 = out.h[m - 1];
  out.extrapolated = (h1 * out.pairing[m - 1] - h2 * out.pairing[m - 2]) / (h1 - h2);
  if (m >= 3) {
    const double e0 = std::abs(out.pairing[m - 3] - out.extrapolated);
    const double e1 = std::abs(out.pairing[m - 2] - out.extrapolated);
    out.rate = (e0 > 0.0 && e1 > 0.0) ? std::log(e0 / e1) / std::log(out.h[m - 3] / out.h[m - 2]) : 0.0;
  }
  out.relative_error = std::abs(out.target) > 0.0 ? std::abs(out.extrapolated - out.target) / std::abs(out.target)
                                                  : std::abs(out.extrapolated);
  return out;
}

}  // namespace lrlab
