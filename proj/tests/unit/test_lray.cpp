#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "lrlab/error.hpp"
#include "lrlab/fields.hpp"
#include "lrlab/lray.hpp"
#include "lrlab/quadrature.hpp"

using namespace lrlab;

namespace {

BumpSpec bump(Point c, Point r, double amp) {
  BumpSpec b;
  b.center = c;
  b.radii = r;
  b.amplitude = amp;
  b.kind = BumpKind::Smooth;
  return b;
}

SpacetimeGrid plane(int n) { return SpacetimeGrid::cube(2, 1.5, -0.75, 0.75, n, n); }

const std::vector<BumpSpec> kF = {bump({0.75, 0.1, -0.05}, {0.4, 0.35, 0.4}, 0.8),
                                  bump({0.7, -0.05, 0.1}, {0.35, 0.4, 0.35}, -0.6),
                                  bump({0.8, 0.0, 0.0}, {0.4, 0.3, 0.35}, 0.5)};
const BumpSpec kPhi = bump({0.75, 0.05, 0.0}, {0.45, 0.4, 0.45}, 0.9);

CovectorField bump_F(const SpacetimeGrid& g) {
  std::vector<AnalyticField> c;
  for (const auto& b : kF) c.push_back(bump_field(3, {b}));
  return CovectorField::from_analytic(g, c);
}

CovectorField grad_phi(const SpacetimeGrid& g) {
  const auto phi = bump_field(3, {kPhi});
  return CovectorField::from_analytic(g, {phi.partial(0), phi.partial(1), phi.partial(2)});
}

double profile(const BumpSpec& b, const Point& p) {
  double rho = 0.0;
  for (int i = 0; i < 3; ++i) rho += std::pow((p[i] - b.center[i]) / b.radii[i], 2);
  return rho < 1.0 ? b.amplitude * std::exp(1.0 - 1.0 / (1.0 - rho)) : 0.0;
}

// each bump integrated over the exact chord of its ellipsoid
double oracle_line(const Point& p, const Point& d) {
  double total = 0.0;
  for (int k = 0; k < 3; ++k) {
    const auto& b = kF[k];
    double qa = 0, qb = 0, qc = -1.0;
    for (int i = 0; i < 3; ++i) {
      const double u = (p[i] - b.center[i]) / b.radii[i], v = d[i] / b.radii[i];
      qa += v * v;
      qb += 2 * u * v;
      qc += u * u;
    }
    const double disc = qb * qb - 4 * qa * qc;
    if (disc <= 0) continue;
    const double s0 = (-qb - std::sqrt(disc)) / (2 * qa), s1 = (-qb + std::sqrt(disc)) / (2 * qa);
    auto f = [&](double s) { return profile(b, axpy(p, s, d)); };
    double err = 0.0;
    total += d[k] * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, s0, s1, 15, 1e-15, &err);
  }
  return total;
}

Direction angle_dir(double a) { return Direction::make({std::cos(a), std::sin(a)}); }

}  // namespace

TEST_CASE("light ray transform") {
  const auto g = plane(31);
  const Ray r0{{0.7, 0.0, 0.0, 0}, angle_dir(0.3)};
  CHECK(light_ray_transform(CovectorField::zeros(g), r0) == 0.0);

  const auto F = bump_F(g);
  const Ray rc{kF[0].center, angle_dir(0.7)};
  const double ref = oracle_line(rc.base, rc.dir.spacetime(1.0));
  REQUIRE(std::abs(ref) > 0.05);
  CHECK(std::abs(light_ray_transform(F, rc) - ref) <= 1e-8 * std::abs(ref));

  const auto G = grad_phi(g);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-0.4, 0.4), A(0.0, 2 * M_PI);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Ray r{{0.75 + U(rng), U(rng), U(rng), 0}, angle_dir(A(rng))};
    worst = std::max(worst, std::abs(light_ray_transform(G, r)));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("projection onto the hyperplane and ray constancy") {
  const auto w = angle_dir(1.1);
  const Point on{0.4, 0.2, -0.1, 0};
  const auto p0 = project_to_hyperplane(on, w);
  const double t = p0.point[0];
  const double xw = p0.point[1] * w.omega[0] + p0.point[2] * w.omega[1];
  CHECK(std::abs(t - xw) < 1e-12);
  const auto p1 = project_to_hyperplane(p0.point, w);
  for (int a = 0; a < 3; ++a) CHECK(std::abs(p1.point[a] - p0.point[a]) < 1e-15);
  CHECK(std::abs(p1.s) < 1e-15);
  const Point moved = axpy(p0.point, 2.0, w.spacetime(-1.0));
  CHECK(project_to_hyperplane(moved, w).s == doctest::Approx(2.0).epsilon(1e-14));

  const auto F = bump_F(plane(31));
  const Direction neg = Direction::make({-w.omega[0], -w.omega[1]});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-0.3, 0.3);
  double worst = 0.0;
  for (int k = 0; k < 40; ++k) {
    const Point p{0.75 + U(rng), U(rng), U(rng), 0};
    const auto pr = project_to_hyperplane(p, w);
    worst = std::max(worst, std::abs(light_ray_transform(F, {p, neg}) - light_ray_transform(F, {pr.point, neg})));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("transverse ray transform") {
  const auto g = plane(31);
  const auto F = bump_F(g);
  const auto h = exterior_derivative(F);
  const TwoFormField zero(g, 3, {ScalarField::zeros(g), ScalarField::zeros(g), ScalarField::zeros(g)});
  const Ray r{{0.72, 0.05, -0.02, 0}, angle_dir(0.4)};
  CHECK(transverse_ray_transform(zero, r, {0.0, 1.0, 0.0, 0}) == 0.0);
  CHECK(std::abs(transverse_ray_transform(h, r, r.dir.spacetime(1.0))) < 1e-10);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-0.3, 0.3), A(0.0, 2 * M_PI);
  const double e = 1e-3;
  double worst = 0.0;
  for (int k = 0; k < 30; ++k) {
    const Ray ray{{0.75 + U(rng), U(rng), U(rng), 0}, angle_dir(A(rng))};
    Point eta{U(rng), U(rng), U(rng), 0};
    auto lf = [&](double s) { return light_ray_transform(F, {axpy(ray.base, s, eta), ray.dir}); };
    const double fd = (8 * (lf(e) - lf(-e)) - (lf(2 * e) - lf(-2 * e))) / (12 * e);
    worst = std::max(worst, std::abs(transverse_ray_transform(h, ray, eta) - fd));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("Fourier slice of a scalar field") {
  const auto g = plane(61);
  const auto q = make_bump(kF[0], g);
  const auto w = angle_dir(0.5);
  const auto frame = HyperplaneFrame::make(w, kF[0].support(3), 0.03);
  for (const auto& b : frame.basis) {
    CHECK(std::abs(dot(b, w.spacetime(1.0), 3)) < 1e-12);
    CHECK(std::abs(norm(b, 3) - 1.0) < 1e-12);
  }
  CHECK(std::abs(dot(frame.basis[0], frame.basis[1], 3)) < 1e-12);

  // ζ = a·(−ξ·ω, ξ) is orthogonal to (1, ω) and space-like for |ξ·ω| < |ξ|
  std::vector<Point> zetas{{0, 0, 0, 0}};
  for (auto [x1, x2] : {std::pair{3.0, -1.0}, {-2.0, 4.0}, {5.0, 2.5}})
    zetas.push_back({-(x1 * w.omega[0] + x2 * w.omega[1]), x1, x2, 0});
  const auto s = fourier_slice(q, frame, zetas);
  double mass = 0.0;
  const auto wts = quad::trapezoid_weights(g);
  for (std::size_t i = 0; i < g.size(); ++i) mass += wts[i] * q[i];
  CHECK(std::abs(s[0].value - mass) <= 1e-6 * mass);
  for (std::size_t k = 1; k < zetas.size(); ++k) {
    const cplx ref = direct_dft(q, zetas[k]);
    CHECK(std::abs(s[k].value - ref) <= 1e-4 * std::abs(ref));
  }
  CHECK_THROWS_AS(fourier_slice(q, frame, {{1.0, 1.0, 0.0, 0}}), Error);
}

TEST_CASE("nonlinear slice identity") {
  const auto g = plane(31);
  const auto w = angle_dir(0.8);
  std::vector<Point> xis;
  for (auto [x1, x2] : {std::pair{0.0, 0.0}, {3.0, -1.0}, {-2.0, 4.0}, {6.0, 1.0}})
    xis.push_back({x1 * w.omega[0] + x2 * w.omega[1], x1, x2, 0});
  const auto Z = CovectorField::from_analytic(g, {AnalyticField::zero(3), AnalyticField::zero(3),
                                                  AnalyticField::zero(3)});
  for (const auto& r : nonlinear_slice_identity(Z, w, xis)) {
    CHECK(r.J == cplx(0.0));
    CHECK(r.rhs == cplx(0.0));
  }
  for (const auto& r : nonlinear_slice_identity(grad_phi(g), w, xis, 0.015)) {
    CHECK(std::abs(r.J) < 1e-6);
    CHECK(std::abs(r.rhs) < 1e-6);
  }
  double worst = 0.0;
  for (const auto& r : nonlinear_slice_identity(bump_F(g), w, xis)) {
    worst = std::max(worst, std::abs(r.J - r.rhs) / (1.0 + std::abs(r.J)));
    CHECK(std::abs(r.J) > 1e-3);
  }
  MESSAGE("nonlinear identity mismatch " << worst);
  CHECK(worst < 1e-3);
  CHECK_THROWS_AS(nonlinear_slice_identity(bump_F(g), w, Point{1.0, 1.0, 0.0, 0}), Error);
}

TEST_CASE("ĥ from transverse data in 1+2 dimensions") {
  const auto g = plane(61);
  const auto F = bump_F(g);
  const auto h = exterior_derivative(F);
  for (const Point zeta : {Point{1.0, 0.0, 4.0, 0}, Point{-2.0, 3.0, 2.0, 0}}) {
    ConeSamples data;
    for (const auto& dir : hhat_directions(zeta, 2)) {
      CHECK(std::abs(dot(zeta, dir.spacetime(1.0), 3)) < 1e-12);
      const auto frame = HyperplaneFrame::make(dir, *F.support(), 0.01);
      const auto s = transverse_slice(h, frame, {zeta});
      data.insert(data.end(), s.begin(), s.end());
    }
    const auto sol = solve_hhat_system(data, zeta, 2);
    double scale = 0.0, err = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        std::vector<double> hij(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) hij[k] = h.value(i, j, k);
        const cplx ref = direct_dft(ScalarField(g, hij), zeta);
        scale = std::max(scale, std::abs(ref));
        err = std::max(err, std::abs(sol.h(i, j) - ref));
        CHECK(sol.h(i, j) == -sol.h(j, i));
      }
    MESSAGE("ĥ error " << err / scale << " asymmetry " << sol.asymmetry << " cond " << sol.condition);
    CHECK(err <= 1e-3 * scale);
    CHECK(sol.asymmetry < 1e-6);
  }
}

TEST_CASE("ĥ system in 1+3 dimensions with spectral data") {
  // transverse data ω̃ᵀ ĥ e_j built from a known antisymmetric matrix
  const Point zeta{0.5, 0.3, 2.0, -0.7};
  Eigen::MatrixXcd H(4, 4);
  H.setZero();
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      H(i, j) = cplx(N(rng), N(rng));
      H(j, i) = -H(i, j);
    }
  ConeSamples data;
  for (const auto& dir : hhat_directions(zeta, 3)) {
    Eigen::VectorXd wt(4);
    wt << 1.0, dir.omega[0], dir.omega[1], dir.omega[2];
    CHECK(std::abs(wt(0) * zeta[0] + wt(1) * zeta[1] + wt(2) * zeta[2] + wt(3) * zeta[3]) < 1e-12);
    const Eigen::VectorXcd v = H.transpose() * wt.cast<cplx>();
    for (int j = 0; j < 4; ++j) data.push_back({zeta, dir.omega, j, v(j)});
  }
  const auto sol = solve_hhat_system(data, zeta, 3);
  CHECK((sol.h - H).norm() < 1e-10 * H.norm());
  CHECK(sol.asymmetry < 1e-12);
  CHECK(sol.residual < 1e-12);
  CHECK(sol.condition < 1e3);

  CHECK_THROWS_AS(solve_hhat_system(data, Point{3.0, 0.3, 2.0, -0.7}, 3), Error);
  try {
    hhat_directions(Point{3.0, 1.0, 0.0, 0.0}, 3);
    FAIL("expected NotSpaceLike");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotSpaceLike);
  }
  ConeSamples one(data.begin(), data.begin() + 4);
  CHECK_THROWS_AS(solve_hhat_system(one, zeta, 3), Error);
}
