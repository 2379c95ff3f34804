#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lrlab/error.hpp"
#include "lrlab/fields.hpp"
#include "lrlab/recon.hpp"

using namespace lrlab;

namespace {

BumpSpec bump(Point c, Point r, double amp, BumpKind kind = BumpKind::Polynomial) {
  BumpSpec b;
  b.center = c;
  b.radii = r;
  b.amplitude = amp;
  b.kind = kind;
  return b;
}

SpacetimeGrid plane(int n) { return SpacetimeGrid::cube(2, 1.5, -0.75, 0.75, n, n); }

Box box3(Point lo, Point hi) {
  Box b;
  b.dim = 3;
  b.lo = lo;
  b.hi = hi;
  return b;
}

double rel_err(const ScalarField& a, const ScalarField& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

std::vector<BumpSpec> form_bumps(BumpKind kind) {
  return {bump({0.75, 0.1, -0.05}, {0.4, 0.35, 0.4}, 0.8, kind), bump({0.7, -0.05, 0.1}, {0.35, 0.4, 0.35}, -0.6, kind),
          bump({0.8, 0.0, 0.0}, {0.4, 0.3, 0.35}, 0.5, kind)};
}

// longer in time than in space, so most of the spectrum sits in the space-like set
std::vector<BumpSpec> slab_bumps() {
  return {bump({0.75, 0.05, -0.05}, {0.5, 0.25, 0.28}, 0.8, BumpKind::Smooth),
          bump({0.7, -0.05, 0.05}, {0.44, 0.28, 0.25}, -0.6, BumpKind::Smooth),
          bump({0.8, 0.0, 0.0}, {0.5, 0.21, 0.25}, 0.5, BumpKind::Smooth)};
}

CovectorField form(const SpacetimeGrid& g, const std::vector<BumpSpec>& spec) {
  std::vector<AnalyticField> c;
  for (const auto& b : spec) c.push_back(bump_field(3, {b}));
  return CovectorField::from_analytic(g, c);
}

CovectorField bump_F(const SpacetimeGrid& g, BumpKind kind) { return form(g, form_bumps(kind)); }

Box padded_support(const std::vector<BumpSpec>& spec, double pad) {
  Box b = spec[0].support(3);
  for (const auto& s : spec) b = Box::merge(b, s.support(3));
  for (int a = 0; a < 3; ++a) {
    b.lo[a] -= pad;
    b.hi[a] += pad;
  }
  return b;
}

AnalyticField potential() { return bump_field(3, {bump({0.75, 0.05, 0.0}, {0.45, 0.4, 0.45}, 0.9)}); }

CovectorField grad_F(const SpacetimeGrid& g) {
  const auto phi = potential();
  return CovectorField::from_analytic(g, {phi.partial(0), phi.partial(1), phi.partial(2)});
}

const Box kSupport = box3({0.25, -0.5, -0.5}, {1.25, 0.5, 0.5});

}  // namespace

TEST_CASE("spectral lattice reproduces the continuous transform of a Gaussian") {
  const auto g = plane(32);
  const double s = 0.1;
  const Point c{0.7, 0.05, -0.1};
  std::vector<cplx> f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point p = g.node(i);
    double r2 = 0;
    for (int a = 0; a < 3; ++a) r2 += (p[a] - c[a]) * (p[a] - c[a]);
    f[i] = std::exp(-r2 / (2 * s * s));
  }
  const FFT fft({32, 32, 32});
  fft.forward(f);
  const SpectralLattice lat(g);
  double worst = 0;
  for (std::size_t i = 0; i < g.size(); i += 97) {
    const Point z = lat.zeta(i);
    double z2 = 0, zc = 0;
    for (int a = 0; a < 3; ++a) {
      z2 += z[a] * z[a];
      zc += z[a] * c[a];
    }
    const cplx exact = std::pow(2 * std::numbers::pi * s * s, 1.5) * std::exp(-s * s * z2 / 2) * std::polar(1.0, -zc);
    worst = std::max(worst, std::abs(lat.to_continuous(i) * f[i] - exact));
    CHECK(lat.index_of(z) == static_cast<std::ptrdiff_t>(i));
  }
  CHECK(worst < 1e-8);
  CHECK(lat.index_of(Point{0.1, 0.0, 0.0}) == -1);

  std::vector<cplx> r(f);
  fft.backward(r);
  fft.forward(r);
  CHECK(std::abs(r[5] / static_cast<double>(g.size()) - f[5]) < 1e-12);
}

TEST_CASE("support mask stays inside the grid") {
  const auto g = plane(20);
  const auto m = support_mask(g, kSupport);
  std::size_t inside = 0;
  for (bool b : m) inside += b;
  CHECK(inside > 0);
  CHECK(inside < g.size());
  CHECK_THROWS_WITH_AS(support_mask(g, box3({0.0, -0.7, -0.5}, {1.0, 0.5, 0.5})), doctest::Contains("two cells"),
                       Error);
  try {
    support_mask(g, box3({0.0, -0.74, -0.5}, {1.0, 0.5, 0.5}));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MaskOutOfRange);
  }
}

TEST_CASE("space-like lattice indices respect the margin") {
  const SpectralLattice lat(plane(16));
  const auto S = spacelike_indices(lat, 0.9);
  REQUIRE(!S.empty());
  for (auto i : S) {
    const Point z = lat.zeta(i);
    const double xi = std::hypot(z[1], z[2]);
    CHECK(xi > 0);
    CHECK(std::abs(z[0]) <= 0.9 * xi + 1e-12);
  }
}

TEST_CASE("Poincare integration") {
  const auto g = plane(41);
  SUBCASE("zero form gives zero gauge") {
    const auto phi = poincare_integrate(CovectorField::zeros(g));
    CHECK(phi.phi().max_abs() == 0.0);
  }
  SUBCASE("gradient round trip") {
    const auto F = grad_F(g);
    const auto exact = sample(g, potential());
    const auto phi = poincare_integrate(F);
    double worst = 0;
    for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(phi.phi()[i] - exact[i]));
    CHECK(worst < 1e-6);
    const auto other = poincare_integrate(F, std::nullopt, {2, 0, 1});
    double diff = 0;
    for (std::size_t i = 0; i < g.size(); ++i) diff = std::max(diff, std::abs(phi.phi()[i] - other.phi()[i]));
    CHECK(diff < 1e-6);
  }
  SUBCASE("non-closed form is rejected") {
    try {
      poincare_integrate(bump_F(g, BumpKind::Smooth));
      FAIL("expected NotClosed");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotClosed);
    }
  }
  SUBCASE("origin inside the support is rejected") {
    try {
      poincare_integrate(grad_F(g), Point{0.75, 0.0, 0.0});
      FAIL("expected OriginInsideSupport");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::OriginInsideSupport);
    }
  }
  SUBCASE("bad axis order") { CHECK_THROWS_AS(poincare_integrate(grad_F(g), std::nullopt, {0, 0, 1}), Error); }
}

TEST_CASE("potential recovery from cone data") {
  const auto g = plane(20);
  const auto mask = support_mask(g, kSupport);
  ReconConfig cfg;
  cfg.pocs.max_iter = 300;
  cfg.pocs.tol = 1e-9;

  SUBCASE("zero data") {
    auto cone = spectral_cone_data(ScalarField::zeros(g), 0.9);
    const auto r = recover_q(cone, g, mask, cfg);
    CHECK(r.field.max_abs() == 0.0);
    CHECK(r.converged);
  }
  SUBCASE("bump") {
    const auto spec = bump({0.75, 0.05, -0.05}, {0.4, 0.35, 0.35}, 1.0, BumpKind::Smooth);
    const auto q = sample(g, bump_field(3, {spec}));
    const auto r = recover_q(spectral_cone_data(q, 0.9), g, support_mask(g, padded_support({spec}, 0.1)), cfg);
    CHECK(rel_err(r.field, q) < 0.1);
    for (std::size_t k = 1; k < r.log.size(); ++k) CHECK(r.log[k].cone_misfit <= r.log[k - 1].cone_misfit * (1 + 1e-9));
    CHECK(r.log.back().cone_misfit < 0.05 * r.log.front().cone_misfit);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(recover_q({}, g, mask, cfg), Error);
    ConeSamples off{{Point{0.1, 0.2, 0.3}, {}, -1, cplx{1.0, 0.0}}};
    CHECK_THROWS_AS(recover_q(off, g, mask, cfg), Error);
    cfg.pocs.relaxation = 0.0;
    CHECK_THROWS_AS(recover_q(spectral_cone_data(ScalarField::zeros(g), 0.9), g, mask, cfg), Error);
  }
}

TEST_CASE("curvature recovery in 1+2 dimensions") {
  const auto g = plane(20);
  const auto mask = support_mask(g, kSupport);
  ReconConfig cfg;
  cfg.pocs.max_iter = 200;

  SUBCASE("exact gradient has no curvature") {
    const auto r = recover_curvature(FieldSpectrumRayData(grad_F(g)), mask, cfg);
    double scale = 0;
    for (int a = 0; a < 3; ++a) scale = std::max(scale, grad_F(g)[a].max_abs());
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) CHECK(r.h.upper(i, j).max_abs() < 1e-3 * scale);
  }
  SUBCASE("bump field") {
    const auto tight = SpacetimeGrid::cube(2, 1.5, -0.5, 0.5, 20, 20);
    const auto F = form(tight, slab_bumps());
    const auto r = recover_curvature(FieldSpectrumRayData(F), support_mask(tight, padded_support(slab_bumps(), 0.02)),
                                     cfg);
    const auto dF = exterior_derivative(F);
    CHECK(r.spacelike_count > 0);
    CHECK(r.max_asymmetry < 1e-8);
    CHECK(r.max_condition < 1e8);
    double num = 0, den = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        for (std::size_t k = 0; k < tight.size(); ++k) {
          num += std::pow(r.h.upper(i, j)[k] - dF.upper(i, j)[k], 2);
          den += std::pow(dF.upper(i, j)[k], 2);
        }
    CHECK(std::sqrt(num / den) < 0.1);
  }
  SUBCASE("gauge invariance") {
    const auto F = bump_F(g, BumpKind::Polynomial);
    const auto G = add(F, grad_F(g));
    const auto r1 = recover_curvature(FieldSpectrumRayData(F), mask, cfg);
    const auto r2 = recover_curvature(FieldSpectrumRayData(G), mask, cfg);
    double num = 0, den = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        for (std::size_t k = 0; k < g.size(); ++k) {
          num += std::pow(r1.h.upper(i, j)[k] - r2.h.upper(i, j)[k], 2);
          den += std::pow(r1.h.upper(i, j)[k], 2);
        }
    CHECK(std::sqrt(num / den) < 1e-3);
  }
}

TEST_CASE("line-integral and spectral ray data agree") {
  const auto g = plane(40);
  const auto F = bump_F(g, BumpKind::Smooth);
  const LineIntegralRayData lines(F, 0.02);
  const FieldSpectrumRayData spec(F);
  const SpectralLattice lat(g);
  const auto S = spacelike_indices(lat, 0.9);
  double worst = 0, scale = 0;
  for (std::size_t s = 0; s < S.size(); s += S.size() / 4) {
    const Point z = lat.zeta(S[s]);
    const auto dirs = hhat_directions(z, 2);
    const auto a = lines.transverse(z, dirs);
    const auto b = spec.transverse(z, dirs);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      worst = std::max(worst, std::abs(a[k].value - b[k].value));
      scale = std::max(scale, std::abs(b[k].value));
    }
  }
  CHECK(scale > 0);
  CHECK(worst < 3e-3 * scale);
}

TEST_CASE("pairing from the input-output map vanishes for equal coefficients") {
  const auto g = SpacetimeGrid::cube(1, 2.0, -1.0, 1.0, 81, 41);
  const auto A = CovectorField::from_analytic(
      g, {bump_field(2, {bump({1.0, 0.0}, {0.4, 0.4}, 0.3)}), bump_field(2, {bump({1.0, 0.05}, {0.35, 0.4}, -0.2)})});
  PairingSetup setup{A, A, ScalarField::zeros(g).with_analytic(AnalyticField::zero(2)), Direction::make({1.0}),
                     {1.0, 1.0}};
  const auto t = extract_raydata_from_lambda(setup, {0.5, 0.25});
  CHECK(std::abs(t.target) == 0.0);
  for (const auto& p : t.pairing) CHECK(std::abs(p) < 1e-12);
  CHECK_THROWS_AS(extract_raydata_from_lambda(setup, {0.5}), Error);
}
