#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lrlab/error.hpp"
#include "lrlab/fields.hpp"
#include "lrlab/pde.hpp"

using namespace lrlab;
using std::numbers::pi;

namespace {

BumpSpec bump(Point c, Point r, double amp, BumpKind kind = BumpKind::Smooth) {
  BumpSpec b;
  b.center = c;
  b.radii = r;
  b.amplitude = amp;
  b.kind = kind;
  return b;
}

// 1-D grid on [-0.5, 0.5] x (0, 1.5) with dt = dx / 2.
SpacetimeGrid line_grid(int nx) {
  const int cells = nx - 1;
  return SpacetimeGrid(1, 1.5, {-0.5, 0, 0}, {0.5, 0, 0}, 3 * cells + 1, {nx, 4, 4});
}

CovectorField coeff_A(const SpacetimeGrid& g) {
  return CovectorField::from_analytic(
      g, {bump_field(2, {bump({0.75, 0.0}, {0.5, 0.35}, 0.6, BumpKind::Polynomial)}),
          bump_field(2, {bump({0.7, 0.05}, {0.45, 0.35}, -0.5, BumpKind::Polynomial)})});
}

ScalarField coeff_q(const SpacetimeGrid& g) {
  return make_bump(bump({0.8, -0.05}, {0.4, 0.35}, 1.2, BumpKind::Polynomial), g);
}

double wave(const Point& p) { return std::sin(2 * pi * (p[1] - p[0])); }
double wave_t(const Point& p) { return -2 * pi * std::cos(2 * pi * (p[1] - p[0])); }

}  // namespace

TEST_CASE("zero data gives zero solution") {
  auto g = line_grid(33);
  auto z = CovectorField::zeros(g);
  InitialData init{std::vector<double>(g.spatial_size()), std::vector<double>(g.spatial_size())};
  DirichletData f{std::vector<double>(g.size())};
  auto s = solve_ibvp(z, sample(g, AnalyticField::zero(2)), init, f, g);
  for (double v : s.u) REQUIRE(v == 0.0);
  auto region = BoundaryRegions::from_direction(1, {1.0});
  auto lam = lambda_from_state(s, region);
  for (double v : lam.final_u) REQUIRE(v == 0.0);
  for (auto& tr : lam.neumann_G)
    for (double v : tr.values) REQUIRE(v == 0.0);
}

TEST_CASE("free traveling wave converges at second order") {
  double err[3];
  int k = 0;
  for (int nx : {64, 128, 256}) {
    auto g = line_grid(nx);
    auto z = CovectorField::zeros(g);
    auto s = solve_ibvp(z, sample(g, AnalyticField::zero(2)), initial_from<double>(g, wave, wave_t),
                        dirichlet_from<double>(g, wave), g);
    double e = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::abs(s.u[i] - wave(g.node(i))));
    err[k++] = e;
  }
  CHECK(err[2] < 1e-3);
  const double o1 = std::log(err[0] / err[1]) / std::log(127.0 / 63.0);
  const double o2 = std::log(err[1] / err[2]) / std::log(255.0 / 127.0);
  CHECK(o1 == doctest::Approx(2.0).epsilon(0.15));
  CHECK(o2 == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("Neumann traces of simple fields") {
  auto g = line_grid(33);
  WaveState lin{g, std::vector<double>(g.size()), 0.0};
  for (std::size_t i = 0; i < g.size(); ++i) lin.u[i] = g.node(i)[1];
  auto tr = neumann_trace(lin, {true, true});
  REQUIRE(tr.size() == 2);
  for (double v : tr[0].values) CHECK(v == doctest::Approx(-1.0).epsilon(1e-12));
  for (double v : tr[1].values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(neumann_trace(lin, {true}), Error);

  auto g2 = line_grid(256);
  auto z = CovectorField::zeros(g2);
  auto s = solve_ibvp(z, sample(g2, AnalyticField::zero(2)), initial_from<double>(g2, wave, wave_t),
                      dirichlet_from<double>(g2, wave), g2);
  auto traces = neumann_trace(s, {true, true});
  double e = 0.0;
  for (const auto& t : traces) {
    const double sign = t.face == 0 ? -1.0 : 1.0;
    const double x = t.face == 0 ? -0.5 : 0.5;
    for (int m = 0; m < g2.n_t(); ++m) {
      const double exact = sign * 2 * pi * std::cos(2 * pi * (x - g2.coord(0, m)));
      e = std::max(e, std::abs(t.values[m] - exact));
    }
  }
  CHECK(e < 5e-3);
}

TEST_CASE("manufactured solution converges at second order with generic coefficients") {
  // u* = cos(t) sin(pi x) + 0.3 t^2 x, with source g = L_{A,q} u*
  auto ustar = [](const Point& p) { return std::cos(p[0]) * std::sin(pi * p[1]) + 0.3 * p[0] * p[0] * p[1]; };
  double err[3];
  int k = 0;
  for (int nx : {33, 65, 129}) {
    auto g = line_grid(nx);
    auto A = coeff_A(g);
    auto q = coeff_q(g);
    auto qt = effective_potential(A, q);
    std::vector<double> src(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Point p = g.node(i);
      const double t = p[0], x = p[1];
      const double u = ustar(p);
      const double ut = -std::sin(t) * std::sin(pi * x) + 0.6 * t * x;
      const double utt = -std::cos(t) * std::sin(pi * x) + 0.6 * x;
      const double ux = pi * std::cos(t) * std::cos(pi * x) + 0.3 * t * t;
      const double uxx = -pi * pi * std::cos(t) * std::sin(pi * x);
      src[i] = utt - uxx + 2 * A[0][i] * ut - 2 * A[1][i] * ux + qt[i] * u;
    }
    auto ut_fn = [](const Point& p) { return -std::sin(p[0]) * std::sin(pi * p[1]) + 0.6 * p[0] * p[1]; };
    auto s = solve_ibvp(A, q, initial_from<double>(g, ustar, ut_fn), dirichlet_from<double>(g, ustar), g, &src);
    double e = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::abs(s.u[i] - ustar(g.node(i))));
    err[k++] = e;
  }
  CHECK(std::log2(err[0] / err[1]) == doctest::Approx(2.0).epsilon(0.15));
  CHECK(std::log2(err[1] / err[2]) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("CFL and non-finite guards") {
  auto g = SpacetimeGrid(1, 1.5, {-0.5, 0, 0}, {0.5, 0, 0}, 40, {64, 4, 4});
  auto z = CovectorField::zeros(g);
  InitialData init{std::vector<double>(g.spatial_size()), std::vector<double>(g.spatial_size())};
  DirichletData f{std::vector<double>(g.size())};
  try {
    solve_ibvp(z, sample(g, AnalyticField::zero(2)), init, f, g);
    FAIL("expected CflViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CflViolation);
  }
  auto g2 = line_grid(17);
  InitialData bad{std::vector<double>(g2.spatial_size()), std::vector<double>(g2.spatial_size())};
  bad.psi[8] = std::nan("");
  try {
    solve_ibvp(CovectorField::zeros(g2), sample(g2, AnalyticField::zero(2)), bad,
               DirichletData{std::vector<double>(g2.size())}, g2);
    FAIL("expected NonfiniteState");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonfiniteState);
  }
}

TEST_CASE("input-output map is deterministic") {
  auto g = line_grid(64);
  auto A = coeff_A(g);
  auto q = coeff_q(g);
  auto region = BoundaryRegions::from_direction(1, {1.0});
  auto init = initial_from<double>(g, wave, wave_t);
  auto f = dirichlet_from<double>(g, wave);
  auto l1 = input_output_map(A, q, init, f, region);
  auto l2 = input_output_map(A, q, init, f, region);
  CHECK(lambda_difference(l1, l2) == 0.0);
  REQUIRE(l1.neumann_G.size() == 1);
  CHECK(l1.neumann_G[0].face == 0);
}

TEST_CASE("boundary regions classify faces by the sign of nu . omega0") {
  auto r = BoundaryRegions::from_direction(2, {std::sqrt(0.5), -std::sqrt(0.5)});
  CHECK(r.illuminated == std::vector<bool>{true, false, false, true});
  CHECK(r.shadowed == std::vector<bool>{false, true, true, false});
  auto r2 = BoundaryRegions::from_direction(2, {1.0, 0.0});
  CHECK(r2.illuminated == std::vector<bool>{true, false, true, true});
  CHECK(r2.shadowed == std::vector<bool>{false, true, true, true});
  CHECK_THROWS_AS(r.with_G({false, true, true, true}), Error);
  CHECK_THROWS_AS(BoundaryRegions::from_direction(2, {1.0, 0.1}), Error);
}

TEST_CASE("gauge-equivalent coefficients give matching boundary data") {
  auto region = BoundaryRegions::from_direction(1, {1.0});
  Probe probe{wave, wave_t};
  {
    auto g = line_grid(64);
    GaugeFunction zero(sample(g, AnalyticField::zero(2)));
    auto r = gauge_equivalence_check(coeff_A(g), coeff_q(g), zero, probe, region, false);
    CHECK(r.u_discrepancy == 0.0);
    CHECK(r.lambda_discrepancy == 0.0);
  }
  double du[2], dl[2];
  int k = 0;
  for (int nx : {64, 128}) {
    auto g = line_grid(nx);
    GaugeFunction phi(make_bump(bump({0.75, 0.0}, {0.55, 0.4}, 0.1, BumpKind::Polynomial), g));
    auto r = gauge_equivalence_check(coeff_A(g), coeff_q(g), phi, probe, region, false);
    du[k] = r.u_discrepancy;
    dl[k] = r.lambda_discrepancy;
    ++k;
  }
  MESSAGE("u: " << du[0] << " " << du[1] << "  lambda: " << dl[0] << " " << dl[1]);
  CHECK(du[0] < 5e-2);
  CHECK(dl[0] < 3e-2);
  CHECK(std::log(du[0] / du[1]) / std::log(127.0 / 63.0) >= 1.5);
  CHECK(std::log(dl[0] / dl[1]) / std::log(127.0 / 63.0) >= 1.5);
}

TEST_CASE("discrete energy is nearly conserved without potentials") {
  const int nx = 49;
  const double dx = 1.0 / (nx - 1);
  const double dt = 0.5 * dx / std::sqrt(2.0);
  const int nt = static_cast<int>(std::ceil(1.5 / dt)) + 1;
  SpacetimeGrid g(2, (nt - 1) * dt, {-0.5, -0.5, 0}, {0.5, 0.5, 0}, nt, {nx, nx, 4});
  CHECK(cfl_number(g) == doctest::Approx(0.5));
  auto qx = AnalyticField::from_function(3, 0, [](const Point& p, int) {
    Jet j;
    j.v = 2.0 + std::cos(3 * p[1]) * std::cos(2 * p[2]);
    return j;
  });
  auto q = sample(g, qx);
  auto blob = bump_field(3, {bump({0.0, 0.1, -0.05}, {1.0, 0.25, 0.25}, 1.0)});
  auto init = initial_from<double>(g, [&](const Point& p) { return blob.value({0.0, p[1], p[2], 0}); },
                                   [](const Point&) { return 0.0; });
  auto s = solve_ibvp(CovectorField::zeros(g), q, init, DirichletData{std::vector<double>(g.size())}, g);
  auto e = discrete_energy(s, q);
  double lo = e.front(), hi = e.front();
  for (double v : e) lo = std::min(lo, v), hi = std::max(hi, v);
  MESSAGE("energy range " << lo << " .. " << hi);
  CHECK((hi - lo) / e.front() < 0.01);
}

namespace {

SpacetimeGrid plane_grid(int cells) {
  return SpacetimeGrid(2, 1.5, {-0.5, -0.5, 0}, {0.5, 0.5, 0}, static_cast<int>(std::lround(1.5 * cells)) + 1,
                       {cells + 1, cells + 1, 4});
}

CovectorField plane_A(const SpacetimeGrid& g) {
  return CovectorField::from_analytic(
      g, {bump_field(3, {bump({0.75, 0.0, 0.05}, {0.6, 0.4, 0.4}, 0.6, BumpKind::Polynomial)}),
          bump_field(3, {bump({0.7, 0.05, 0.0}, {0.55, 0.4, 0.4}, -0.5, BumpKind::Polynomial)}),
          bump_field(3, {bump({0.8, -0.05, 0.05}, {0.6, 0.4, 0.4}, 0.4, BumpKind::Polynomial)})});
}

AnalyticField cubic_ramp() {
  // 16 (t/T)^3 (1/4 - x^2)(1/4 - y^2) with T = 1.5: vanishes on Σ and to second order at t = 0
  return AnalyticField::from_function(3, 1, [](const Point& p, int order) {
    Jet j;
    const double r = p[0] / 1.5, bx = 0.25 - p[1] * p[1], by = 0.25 - p[2] * p[2];
    j.v = 16 * r * r * r * bx * by;
    if (order >= 1) {
      j.d1[0] = 16 * 3 * r * r / 1.5 * bx * by;
      j.d1[1] = 16 * r * r * r * (-2 * p[1]) * by;
      j.d1[2] = 16 * r * r * r * bx * (-2 * p[2]);
    }
    return j;
  });
}

AnalyticField smooth_test_v() {
  // cos(t + 0.5x) exp(0.3y)
  return AnalyticField::from_function(3, 2, [](const Point& p, int order) {
    Jet j;
    const double c = std::cos(p[0] + 0.5 * p[1]), s = std::sin(p[0] + 0.5 * p[1]), e = std::exp(0.3 * p[2]);
    j.v = c * e;
    if (order >= 1) {
      j.d1[0] = -s * e;
      j.d1[1] = -0.5 * s * e;
      j.d1[2] = 0.3 * c * e;
    }
    if (order >= 2) {
      const double a[3] = {1.0, 0.5, 0.0};
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) {
          double v;
          if (i < 2 && k < 2) v = -a[i] * a[k] * c * e;
          else if (i == 2 && k == 2) v = 0.09 * c * e;
          else v = -0.3 * a[i == 2 ? k : i] * s * e;
          j.d2[i * kMaxDim + k] = v;
        }
    }
    return j;
  });
}

}  // namespace

TEST_CASE("Green's identity with interior bumps") {
  double r[3];
  int k = 0;
  for (int cells : {24, 48, 96}) {
    auto g = plane_grid(cells);
    auto u = make_bump(bump({0.75, 0.02, -0.02}, {0.6, 0.38, 0.38}, 1.0, BumpKind::Polynomial), g);
    auto v = make_bump(bump({0.8, 0.0, 0.02}, {0.6, 0.38, 0.38}, 1.0, BumpKind::Polynomial), g);
    auto z = CovectorField::zeros(g);
    auto zq = sample(g, AnalyticField::zero(3));
    r[k++] = greens_identity_residual(z, zq, u, v);
    if (cells == 48) CHECK(greens_identity_residual(z, zq, u, v, AdjointDerivatives::FiniteDifference) < 1e-12);
  }
  MESSAGE("residuals " << r[0] << " " << r[1] << " " << r[2]);
  CHECK(std::log2(r[0] / r[1]) == doctest::Approx(2.0).epsilon(0.15));
  CHECK(std::log2(r[1] / r[2]) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("Green's identity with v = 1 and generic coefficients") {
  auto g = plane_grid(48);
  auto u = make_bump(bump({0.75, 0.02, -0.02}, {0.6, 0.38, 0.38}, 1.0, BumpKind::Polynomial), g);
  auto q = make_bump(bump({0.7, 0.0, 0.0}, {0.4, 0.3, 0.3}, 0.8), g);
  auto one = sample(g, AnalyticField::constant(3, 1.0));
  const double r = greens_identity_residual(plane_A(g), q, u, one);
  MESSAGE("residual " << r << " A only " << greens_identity_residual(plane_A(g), ScalarField::zeros(g), u, one)
          << " q only " << greens_identity_residual(CovectorField::zeros(g), q, u, one));
  CHECK(r < 1e-4);
  CHECK(greens_identity_residual(plane_A(g), q, ScalarField::zeros(g), one) == 0.0);
}

TEST_CASE("Green's identity with boundary and final-time terms") {
  double r[3];
  int k = 0;
  for (int cells : {24, 48, 96}) {
    auto g = plane_grid(cells);
    auto u = sample(g, cubic_ramp());
    auto v = sample(g, smooth_test_v());
    auto q = make_bump(bump({0.7, 0.0, 0.0}, {0.4, 0.3, 0.3}, 0.8), g);
    r[k++] = greens_identity_residual(plane_A(g), q, u, v);
  }
  MESSAGE("residuals " << r[0] << " " << r[1] << " " << r[2]);
  CHECK(r[1] < 1e-4);
  CHECK(std::log2(r[0] / r[1]) == doctest::Approx(2.0).epsilon(0.15));
  CHECK(std::log2(r[1] / r[2]) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("Green's identity rejects fields that do not vanish initially") {
  auto g = plane_grid(24);
  auto bad = sample(g, AnalyticField::constant(3, 1.0));
  try {
    greens_identity_residual(CovectorField::zeros(g), ScalarField::zeros(g), bad, bad);
    FAIL("expected PreconditionViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PreconditionViolation);
  }
}
