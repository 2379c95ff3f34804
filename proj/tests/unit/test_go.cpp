#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "lrlab/error.hpp"
#include "lrlab/fields.hpp"
#include "lrlab/go.hpp"

using namespace lrlab;

namespace {

BumpSpec bump(Point c, Point r, double amp, BumpKind kind) {
  BumpSpec b;
  b.center = c;
  b.radii = r;
  b.amplitude = amp;
  b.kind = kind;
  return b;
}

SpacetimeGrid plane(int n) { return SpacetimeGrid::cube(2, 1.5, -0.75, 0.75, n, n); }

const BumpSpec kA0 = bump({0.75, 0.1, -0.05}, {0.4, 0.35, 0.4}, 0.8, BumpKind::Smooth);
const BumpSpec kA1 = bump({0.7, -0.05, 0.1}, {0.35, 0.4, 0.35}, -0.6, BumpKind::Smooth);
const BumpSpec kA2 = bump({0.8, 0.0, 0.0}, {0.4, 0.3, 0.35}, 0.5, BumpKind::Smooth);

CovectorField bump_A(const SpacetimeGrid& g, BumpKind kind = BumpKind::Smooth) {
  std::vector<AnalyticField> c;
  for (auto b : {kA0, kA1, kA2}) {
    b.kind = kind;
    c.push_back(bump_field(3, {b}));
  }
  return CovectorField::from_analytic(g, c);
}

double profile(const BumpSpec& b, const Point& p, BumpKind kind) {
  double rho = 0.0;
  for (int i = 0; i < 3; ++i) rho += std::pow((p[i] - b.center[i]) / b.radii[i], 2);
  if (rho >= 1.0) return 0.0;
  return b.amplitude * (kind == BumpKind::Smooth ? std::exp(1.0 - 1.0 / (1.0 - rho)) : std::pow(1.0 - rho, 6));
}

// Each bump is integrated separately over the exact s-interval where the ray is inside its ellipsoid.
double oracle_halfline(const Point& p, const std::vector<double>& w, BumpKind kind = BumpKind::Smooth) {
  const Point d{1.0, -w[0], -w[1], 0.0};
  const BumpSpec* bumps[3] = {&kA0, &kA1, &kA2};
  const double coef[3] = {1.0, -w[0], -w[1]};
  double total = 0.0;
  for (int k = 0; k < 3; ++k) {
    const BumpSpec& b = *bumps[k];
    double qa = 0, qb = 0, qc = -1.0;
    for (int i = 0; i < 3; ++i) {
      const double u = (p[i] - b.center[i]) / b.radii[i], v = d[i] / b.radii[i];
      qa += v * v;
      qb += 2 * u * v;
      qc += u * u;
    }
    const double disc = qb * qb - 4 * qa * qc;
    if (disc <= 0) continue;
    const double s0 = std::max(0.0, (-qb - std::sqrt(disc)) / (2 * qa));
    const double s1 = (-qb + std::sqrt(disc)) / (2 * qa);
    if (s1 <= s0) continue;
    auto f = [&](double s) { return profile(b, axpy(p, s, d), kind); };
    double err = 0.0;
    total += coef[k] * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, s0, s1, 15, 1e-15, &err);
  }
  return total;
}

const Direction kOmega = Direction::make({0.6, 0.8});

}  // namespace

TEST_CASE("direction and slice validation") {
  CHECK_THROWS_AS(Direction::make({1.0, 0.1}), Error);
  CHECK_NOTHROW(Direction::make({0.6, 0.8}, std::vector<double>{0.8, 0.6}, 0.5));
  CHECK_THROWS_AS(Direction::make({0.6, 0.8}, std::vector<double>{-0.6, -0.8}, 0.5), Error);
  try {
    SliceQuery::make(kOmega, {1.0, 1.0, 0.0});
    FAIL("expected SliceViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SliceViolation);
  }
  // ζ·(1,−ω) = ζ0 − ζ·ω
  CHECK_NOTHROW(SliceQuery::make(kOmega, {0.6 * 2.0 + 0.8 * 1.0, 2.0, 1.0}));
}

TEST_CASE("half-line ray integral") {
  const auto g = plane(31);
  CHECK(ray_integral_halfline(CovectorField::zeros(g), {0.3, 0.0, 0.0, 0}, kOmega) == 0.0);
  const auto A = bump_A(g);
  CHECK(ray_integral_halfline(A, {1.3, 0.0, 0.0, 0}, kOmega) == 0.0);

  const Point p{0.25, 0.1 + 0.5 * 0.6, -0.05 + 0.5 * 0.8, 0};
  const double ref = oracle_halfline(p, kOmega.omega);
  REQUIRE(std::abs(ref) > 0.05);
  CHECK(std::abs(ray_integral_halfline(A, p, kOmega) - ref) <= 1e-8 * std::abs(ref));

  const double refp = oracle_halfline(p, kOmega.omega, BumpKind::Polynomial);
  std::vector<double> errs, vals;
  for (int n : {31, 61, 121}) {
    const auto gs = plane(n);
    const auto As = bump_A(gs, BumpKind::Polynomial);
    const CovectorField sampled({ScalarField(gs, As[0].vec()), ScalarField(gs, As[1].vec()),
                                 ScalarField(gs, As[2].vec())});
    vals.push_back(ray_integral_halfline(sampled, p, kOmega));
    errs.push_back(std::abs(vals.back() - refp));
  }
  MESSAGE("sampled errors " << errs[0] << " " << errs[1] << " " << errs[2]);
  CHECK(std::log2(errs[1] / errs[2]) > 1.8);
  const double extrapolated = (4.0 * vals[2] - vals[1]) / 3.0;
  CHECK(std::abs(extrapolated - refp) <= 1e-4 * std::abs(refp));
}

TEST_CASE("amplitudes: trivial cases") {
  const auto g = plane(21);
  const auto A0 = CovectorField::from_analytic(g, {AnalyticField::zero(3), AnalyticField::zero(3),
                                                   AnalyticField::zero(3)});
  const auto q = SliceQuery::make(kOmega, {0.6 * 2.0 + 0.8 * 1.0, 2.0, 1.0});
  const auto Bg = amplitude_growing(A0, q);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point p = g.node(i);
    err = std::max(err, std::abs(Bg.B()[i] - std::exp(cplx(0, -dot(q.zeta, p, 3)))));
  }
  CHECK(err < 1e-14);
  CHECK(transport_residual(Bg, A0) < 1e-10);
  const auto Bd = amplitude_decaying(A0, kOmega);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(Bd.B()[i] == cplx(1.0, 0.0));
  CHECK(transport_residual(Bd, A0) == 0.0);

  const auto A = bump_A(g);
  const auto B0 = amplitude_growing(A, SliceQuery::make(kOmega, {0, 0, 0}));
  const auto Bdd = amplitude_decaying(A, kOmega);
  double cancel = 0.0, imag = 0.0, positive = 1.0, exp_err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    cancel = std::max(cancel, std::abs(B0.B()[i] * Bdd.B()[i] - 1.0));
    imag = std::max(imag, std::abs(B0.B()[i].imag()));
    positive = std::min(positive, B0.B()[i].real());
    exp_err = std::max(exp_err, std::abs(B0.B()[i].real() - std::exp(ray_integral_halfline(A, g.node(i), kOmega))));
  }
  CHECK(cancel < 1e-13);
  CHECK(imag == 0.0);
  CHECK(positive > 0.0);
  CHECK(exp_err < 1e-13);
}

TEST_CASE("transport residual with closed-form derivatives") {
  const auto g = plane(25);
  const auto A = bump_A(g);
  const auto Bg = amplitude_growing(A, SliceQuery::make(kOmega, {0.6 * 1.5 - 0.8 * 2.0, 1.5, -2.0}));
  const auto Bd = amplitude_decaying(A, kOmega);
  const double rg = transport_residual(Bg, A), rd = transport_residual(Bd, A);
  MESSAGE("growing " << rg << " decaying " << rd);
  CHECK(rg < 1e-6);
  CHECK(rd < 1e-6);
  const auto Bp = amplitude_growing(A, SliceQuery::make(kOmega, {0.6 * 1.5 - 0.8 * 2.0, 1.5, -2.0}), false);
  CHECK(transport_residual(Bp, A) < 1e-6);
}

TEST_CASE("transport residual with fourth-order differences") {
  std::vector<double> r;
  for (int n : {21, 41, 81}) {
    const auto g = plane(n);
    const auto A = bump_A(g, BumpKind::Polynomial);
    const auto Bg = amplitude_growing(A, SliceQuery::make(kOmega, {0.6 * 1.5 - 0.8 * 2.0, 1.5, -2.0}));
    r.push_back(transport_residual(Bg, A, DerivativeMode::FiniteDifference));
  }
  const double o1 = std::log2(r[0] / r[1]), o2 = std::log2(r[1] / r[2]);
  MESSAGE("FD residuals " << r[0] << " " << r[1] << " " << r[2] << " orders " << o1 << " " << o2);
  CHECK(o2 > 3.5);
}

TEST_CASE("conjugated remainder") {
  const auto g = plane(25);
  const auto Z = CovectorField::from_analytic(g, {AnalyticField::zero(3), AnalyticField::zero(3),
                                                  AnalyticField::zero(3)});
  const auto q0 = ScalarField::zeros(g);
  const auto B1 = amplitude_growing(Z, SliceQuery::make(kOmega, {0, 0, 0}));
  for (double h : {0.1, 0.05, 0.025}) CHECK(conjugated_remainder(Z, q0, B1, h).value == 0.0);
  CHECK_THROWS_AS(conjugated_remainder(Z, q0, B1, 0.0), Error);

  const auto qb = make_bump(bump({0.7, 0.0, 0.05}, {0.4, 0.4, 0.35}, 1.5, BumpKind::Smooth), g);
  const double v1 = conjugated_remainder(Z, qb, B1, 0.05).value;
  const double v2 = conjugated_remainder(Z, scaled(2.0, qb), B1, 0.05).value;
  CHECK(v2 == doctest::Approx(2.0 * v1).epsilon(1e-12));

  const auto A = bump_A(g);
  const auto Bg = amplitude_growing(A, SliceQuery::make(kOmega, {0.6 * 1.5 - 0.8 * 2.0, 1.5, -2.0}));
  std::vector<double> hs{0.1, 0.05, 0.025}, hv;
  double lo = INFINITY, hi = 0.0;
  RemainderReport last;
  for (double h : hs) {
    last = conjugated_remainder(A, qb, Bg, h);
    lo = std::min(lo, last.value);
    hi = std::max(hi, last.value);
    hv.push_back(h * last.value);
  }
  MESSAGE("plateau " << lo << " .. " << hi);
  CHECK((hi - lo) / hi < 0.1);
  const double slope = (hv[0] - hv[2]) / (hs[0] - hs[2]);
  const double intercept = hv[0] - slope * hs[0];
  CHECK(std::abs(slope - last.leading) <= 0.05 * last.leading);
  CHECK(std::abs(intercept - last.transport) <= 0.05 * last.leading);
  const auto Bd = amplitude_decaying(A, kOmega);
  const auto rd0 = conjugated_remainder(A, qb, Bd, 0.1), rd1 = conjugated_remainder(A, qb, Bd, 0.025);
  CHECK(std::abs(rd0.value - rd1.value) < 0.1 * rd0.value);
}
