#include "lrlab/lray.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lrlab/error.hpp"
#include "lrlab/fields.hpp"
#include "lrlab/quadrature.hpp"
#include "lrlab/rays.hpp"

namespace lrlab {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

CovectorField scalar_as_covector(const ScalarField& g) {
  const int dim = g.grid().dim();
  std::vector<ScalarField> c{g};
  ScalarField z = ScalarField::zeros(g.grid());
  if (g.has_analytic()) z = z.with_analytic(AnalyticField::zero(dim));
  c.resize(dim, z);
  return CovectorField(c, false);
}

/// Column j of h as a covector, so that (1,ω)·G integrates Σ_i ω^i h_ij.
CovectorField column_field(const TwoFormField& h, int j) {
  const auto& g = h.grid();
  std::vector<ScalarField> c;
  for (int i = 0; i < h.dim(); ++i) {
    std::vector<double> s(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) s[k] = h.value(i, j, k);
    ScalarField f(g, std::move(s));
    if (h.has_analytic()) f = f.with_analytic(h.analytic(i, j));
    c.push_back(f);
  }
  return CovectorField(c, false);
}

void check_dims(const SpacetimeGrid& g, const Direction& dir) {
  require(dir.n() == g.n_spatial(), ErrorCode::InvalidArgument, "direction dimension does not match the grid");
}

void check_slice(const Point& zeta, const Point& d, int dim) {
  const double r = dot(zeta, d, dim);
  require(std::abs(r) <= 1e-10 * std::max(1.0, norm(zeta, dim)), ErrorCode::SliceViolation,
          "frequency is not orthogonal to the ray direction: residual " + std::to_string(r));
}

std::vector<double> ray_values(const RayIntegrator& rays, const HyperplaneFrame& frame, const Point& d,
                               const Point& c) {
  std::vector<double> v(frame.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(v.size()); ++i)
    v[i] = rays.integrate(frame.node(i), d, c, -INFINITY, INFINITY, 0).value;
  return v;
}

std::vector<cplx> hyperplane_ft(const HyperplaneFrame& frame, const std::vector<cplx>& f,
                                const std::vector<Point>& zetas) {
  const int dim = frame.n() + 1;
  std::vector<Point> nodes(frame.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = frame.node(i);
  std::vector<cplx> out(zetas.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t z = 0; z < static_cast<std::ptrdiff_t>(zetas.size()); ++z) {
    cplx acc{};
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (f[i] != 0.0) acc += f[i] * std::polar(1.0, -dot(zetas[z], nodes[i], dim));
    out[z] = acc * frame.cell();
  }
  return out;
}

ConeSamples slice_of(const CovectorField& F, const HyperplaneFrame& frame, const std::vector<Point>& zetas, int eta) {
  check_dims(F.grid(), frame.dir);
  const int dim = frame.n() + 1;
  const Point d = frame.dir.spacetime(1.0);
  for (const auto& z : zetas) check_slice(z, d, dim);
  const RayIntegrator rays(F);
  const auto lf = ray_values(rays, frame, d, d);
  const auto ft = hyperplane_ft(frame, std::vector<cplx>(lf.begin(), lf.end()), zetas);
  ConeSamples out;
  for (std::size_t z = 0; z < zetas.size(); ++z) out.push_back({zetas[z], frame.dir.omega, eta, kSqrt2 * ft[z]});
  return out;
}

}  // namespace

double light_ray_transform(const CovectorField& F, const Ray& ray) {
  check_dims(F.grid(), ray.dir);
  const Point d = ray.dir.spacetime(1.0);
  return RayIntegrator(F).integrate(ray.base, d, d, -INFINITY, INFINITY, 0).value;
}

double light_ray_transform(const ScalarField& g, const Ray& ray) {
  check_dims(g.grid(), ray.dir);
  Point c{};
  c[0] = 1.0;
  return RayIntegrator(scalar_as_covector(g)).integrate(ray.base, ray.dir.spacetime(1.0), c, -INFINITY, INFINITY, 0).value;
}

double transverse_ray_transform(const TwoFormField& h, const Ray& ray, const Point& eta) {
  check_dims(h.grid(), ray.dir);
  const Point d = ray.dir.spacetime(1.0);
  double total = 0.0;
  for (int j = 0; j < h.dim(); ++j) {
    if (eta[j] == 0.0) continue;
    total += eta[j] * RayIntegrator(column_field(h, j)).integrate(ray.base, d, d, -INFINITY, INFINITY, 0).value;
  }
  return total;
}

HyperplaneFrame HyperplaneFrame::make(const Direction& dir, const Box& support, double spacing) {
  require(spacing > 0.0, ErrorCode::InvalidArgument, "lattice spacing must be positive");
  HyperplaneFrame f;
  f.dir = dir;
  f.spacing = spacing;
  const int dim = dir.n() + 1;
  Point u = dir.spacetime(1.0);
  for (int a = 0; a < dim; ++a) u[a] /= kSqrt2;
  std::vector<Point> ortho{u};
  for (int a = 0; a < dim && static_cast<int>(f.basis.size()) < dim - 1; ++a) {
    Point v{};
    v[a] = 1.0;
    for (const auto& b : ortho) v = axpy(v, -dot(v, b, dim), b);
    const double nv = norm(v, dim);
    if (nv < 1e-6) continue;
    for (int k = 0; k < dim; ++k) v[k] /= nv;
    ortho.push_back(v);
    f.basis.push_back(v);
  }
  Point c{};
  double r2 = 0.0;
  for (int a = 0; a < dim; ++a) {
    c[a] = 0.5 * (support.lo[a] + support.hi[a]);
    r2 += 0.25 * (support.hi[a] - support.lo[a]) * (support.hi[a] - support.lo[a]);
  }
  f.center = axpy(c, -dot(c, u, dim), u);
  f.half_count = static_cast<int>(std::ceil(std::sqrt(r2) / spacing));
  return f;
}

std::size_t HyperplaneFrame::size() const {
  std::size_t s = 1;
  for (int k = 0; k < n(); ++k) s *= static_cast<std::size_t>(2 * half_count + 1);
  return s;
}

Point HyperplaneFrame::node(std::size_t i) const {
  const std::size_t side = 2 * half_count + 1;
  Point p = center;
  for (int k = n() - 1; k >= 0; --k) {
    const int a = static_cast<int>(i % side) - half_count;
    i /= side;
    p = axpy(p, a * spacing, basis[k]);
  }
  return p;
}

double HyperplaneFrame::cell() const { return std::pow(spacing, n()); }

ConeSamples fourier_slice(const CovectorField& F, const HyperplaneFrame& frame, const std::vector<Point>& zetas) {
  return slice_of(F, frame, zetas, -1);
}

ConeSamples fourier_slice(const ScalarField& g, const HyperplaneFrame& frame, const std::vector<Point>& zetas) {
  check_dims(g.grid(), frame.dir);
  const int dim = frame.n() + 1;
  const Point d = frame.dir.spacetime(1.0);
  for (const auto& z : zetas) check_slice(z, d, dim);
  Point c{};
  c[0] = 1.0;
  const RayIntegrator rays(scalar_as_covector(g));
  const auto lg = ray_values(rays, frame, d, c);
  const auto ft = hyperplane_ft(frame, std::vector<cplx>(lg.begin(), lg.end()), zetas);
  ConeSamples out;
  for (std::size_t z = 0; z < zetas.size(); ++z) out.push_back({zetas[z], frame.dir.omega, -1, kSqrt2 * ft[z]});
  return out;
}

ConeSamples transverse_slice(const TwoFormField& h, const HyperplaneFrame& frame, const std::vector<Point>& zetas) {
  ConeSamples out;
  for (int j = 0; j < h.dim(); ++j) {
    auto s = slice_of(column_field(h, j), frame, zetas, j);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

cplx direct_dft(const ScalarField& g, const Point& zeta) {
  const auto& grid = g.grid();
  const auto w = quad::trapezoid_weights(grid);
  cplx acc{};
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (g[i] != 0.0) acc += (w[i] * g[i]) * std::polar(1.0, -dot(zeta, grid.node(i), grid.dim()));
  return acc;
}

HyperplaneProjection project_to_hyperplane(const Point& p, const Direction& omega) {
  const int n = omega.n();
  double xw = 0.0;
  for (int k = 0; k < n; ++k) xw += p[k + 1] * omega.omega[k];
  HyperplaneProjection r;
  r.s = 0.5 * (p[0] - xw);
  r.point[0] = 0.5 * (p[0] + xw);
  for (int k = 0; k < n; ++k) r.point[k + 1] = p[k + 1] + r.s * omega.omega[k];
  return r;
}

std::vector<SliceIdentity> nonlinear_slice_identity(const CovectorField& A, const Direction& omega,
                                                    const std::vector<Point>& xis, double spacing) {
  check_dims(A.grid(), omega);
  const int dim = omega.n() + 1;
  const Point wt = omega.spacetime(-1.0);
  for (const auto& xi : xis) check_slice(xi, wt, dim);
  const RayIntegrator rays(A);
  std::vector<SliceIdentity> out(xis.size());
  if (rays.support().empty()) return out;
  const Box box = rays.support();

  // J on a uniform lattice over the support box
  std::array<int, kMaxDim> cnt{};
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) {
    cnt[a] = static_cast<int>(std::ceil((box.hi[a] - box.lo[a]) / spacing)) + 1;
    total *= cnt[a];
  }
  std::vector<Point> nodes(total);
  std::vector<cplx> vals(total);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(total); ++i) {
    std::size_t r = i;
    Point p{};
    for (int a = dim - 1; a >= 0; --a) {
      p[a] = box.lo[a] + static_cast<double>(r % cnt[a]) * spacing;
      r /= cnt[a];
    }
    nodes[i] = p;
    double wa = 0.0;
    for (int a = 0; a < dim; ++a)
      wa += wt[a] * (A[a].has_analytic() ? A[a].analytic().value(p) : interpolate(A[a], p));
    if (wa == 0.0) continue;
    vals[i] = wa * std::exp(rays.integrate(p, wt, wt, 0.0, INFINITY, 0).value);
  }
  const double cellJ = std::pow(spacing, dim);
  for (std::size_t z = 0; z < xis.size(); ++z) {
    cplx acc{};
    for (std::size_t i = 0; i < total; ++i)
      if (vals[i] != 0.0) acc += vals[i] * std::polar(1.0, -dot(xis[z], nodes[i], dim));
    out[z].J = acc * cellJ;
  }

  // right-hand side on the hyperplane (1,−ω)^⊥
  std::vector<double> neg(omega.omega);
  for (auto& v : neg) v = -v;
  const auto frame = HyperplaneFrame::make(Direction{neg, std::nullopt, 0.0}, box, spacing);
  const auto la = ray_values(rays, frame, wt, wt);
  std::vector<cplx> f(la.size());
  for (std::size_t i = 0; i < la.size(); ++i) f[i] = la[i] == 0.0 ? 0.0 : 1.0 - std::exp(la[i]);
  const auto ft = hyperplane_ft(frame, f, xis);
  for (std::size_t z = 0; z < xis.size(); ++z) out[z].rhs = -kSqrt2 * ft[z];
  return out;
}

SliceIdentity nonlinear_slice_identity(const CovectorField& A, const Direction& omega, const Point& xi,
                                       double spacing) {
  return nonlinear_slice_identity(A, omega, std::vector<Point>{xi}, spacing).front();
}

std::vector<Direction> hhat_directions(const Point& zeta, int n, const std::vector<double>& angles) {
  require(n == 2 || n == 3, ErrorCode::InsufficientDirections, "ĥ sampling needs n = 2 or n = 3");
  double r = 0.0;
  for (int k = 1; k <= n; ++k) r += zeta[k] * zeta[k];
  r = std::sqrt(r);
  require(std::abs(zeta[0]) < r, ErrorCode::NotSpaceLike, "frequency is not space-like");
  std::array<double, 3> xh{};
  for (int k = 0; k < n; ++k) xh[k] = zeta[k + 1] / r;
  const double c = -zeta[0] / r, s = std::sqrt(1.0 - c * c);
  auto unit = [](std::vector<double> v) {
    double m = 0.0;
    for (double x : v) m += x * x;
    for (double& x : v) x /= std::sqrt(m);
    return v;
  };
  std::vector<Direction> out;
  if (n == 2) {
    const std::array<double, 2> u{-xh[1], xh[0]};
    for (double sg : {1.0, -1.0})
      out.push_back(Direction::make(unit({c * xh[0] + sg * s * u[0], c * xh[1] + sg * s * u[1]})));
    return out;
  }
  int least = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(xh[k]) < std::abs(xh[least])) least = k;
  std::array<double, 3> u{};
  u[least] = 1.0;
  const double pr = xh[least];
  for (int k = 0; k < 3; ++k) u[k] -= pr * xh[k];
  const double nu = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
  for (double& x : u) x /= nu;
  const std::array<double, 3> v{xh[1] * u[2] - xh[2] * u[1], xh[2] * u[0] - xh[0] * u[2],
                                xh[0] * u[1] - xh[1] * u[0]};
  auto at = [&](double a) {
    std::vector<double> w(3);
    for (int k = 0; k < 3; ++k) w[k] = c * xh[k] + s * (std::cos(a) * u[k] + std::sin(a) * v[k]);
    return Direction::make(unit(w));
  };
  out.push_back(at(0.0));
  for (double a : angles) {
    out.push_back(at(a));
    out.push_back(at(-a));
  }
  return out;
}

HhatSolution solve_hhat_system(const ConeSamples& samples, const Point& zeta, int n) {
  const int dim = n + 1;
  double r = 0.0;
  for (int k = 1; k <= n; ++k) r += zeta[k] * zeta[k];
  require(std::abs(zeta[0]) < std::sqrt(r), ErrorCode::NotSpaceLike, "frequency is not space-like");
  const double zn = norm(zeta, dim);
  struct Group {
    std::vector<double> omega;
    std::vector<cplx> v;
    std::vector<bool> have;
  };
  std::vector<Group> groups;
  for (const auto& s : samples) {
    if (s.eta < 0 || s.eta >= dim) continue;
    bool same = true;
    for (int a = 0; a < dim; ++a) same = same && std::abs(s.zeta[a] - zeta[a]) <= 1e-9 * (1.0 + zn);
    if (!same) continue;
    Group* g = nullptr;
    for (auto& cand : groups) {
      bool eq = cand.omega.size() == s.omega.size();
      for (std::size_t k = 0; eq && k < s.omega.size(); ++k) eq = std::abs(cand.omega[k] - s.omega[k]) <= 1e-12;
      if (eq) g = &cand;
    }
    if (!g) {
      groups.push_back({s.omega, std::vector<cplx>(dim), std::vector<bool>(dim, false)});
      g = &groups.back();
    }
    g->v[s.eta] = s.value;
    g->have[s.eta] = true;
  }
  std::vector<const Group*> full;
  for (const auto& g : groups)
    if (std::all_of(g.have.begin(), g.have.end(), [](bool b) { return b; })) full.push_back(&g);
  require(static_cast<int>(full.size()) >= n, ErrorCode::InsufficientDirections,
          "need complete transverse data for at least n directions, got " + std::to_string(full.size()));

  const int m = static_cast<int>(full.size());
  Eigen::MatrixXd W(m, dim);
  Eigen::MatrixXcd V(m, dim);
  for (int i = 0; i < m; ++i) {
    W(i, 0) = 1.0;
    for (int k = 0; k < n; ++k) W(i, k + 1) = full[i]->omega[k];
    for (int j = 0; j < dim; ++j) V(i, j) = full[i]->v[j];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(W, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  HhatSolution out;
  out.condition = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1) : INFINITY;
  if (!(out.condition <= 1e8)) {
    std::string dirs;
    for (const auto* g : full) {
      dirs += " (";
      for (double w : g->omega) dirs += std::to_string(w) + " ";
      dirs += ")";
    }
    fail(ErrorCode::IllConditioned, "direction system condition number " + std::to_string(out.condition) +
                                        " exceeds 1e8 for directions" + dirs);
  }
  // pseudo-inverse restricted to the n-dimensional row space, which is ζ^⊥
  Eigen::MatrixXcd H0 = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXcd vk = svd.matrixV().col(k).cast<cplx>();
    const Eigen::VectorXcd uk = svd.matrixU().col(k).cast<cplx>();
    H0 += (vk / sv(k)) * (uk.transpose() * V);
  }
  const double vn = V.norm();
  out.residual = vn > 0.0 ? (W.cast<cplx>() * H0 - V).norm() / vn : 0.0;
  Eigen::VectorXcd zh(dim);
  for (int a = 0; a < dim; ++a) zh(a) = zeta[a] / zn;
  const Eigen::MatrixXcd H = H0 - zh * (H0 * zh).transpose();
  const double hn = H.norm();
  out.asymmetry = hn > 0.0 ? (H + H.transpose()).norm() / hn : 0.0;
  out.h = 0.5 * (H - H.transpose());
  return out;
}

}  // namespace lrlab
