#include "lrlab/go.hpp"

#include <cmath>
#include <memory>

#include "lrlab/error.hpp"
#include "lrlab/fields.hpp"
#include "lrlab/finite_difference.hpp"
#include "lrlab/quadrature.hpp"
#include "lrlab/rays.hpp"

namespace lrlab {

Direction Direction::make(std::vector<double> omega, std::optional<std::vector<double>> omega0, double eps) {
  require(!omega.empty() && omega.size() <= 3, ErrorCode::InvalidArgument, "direction must have 1 to 3 components");
  double s = 0.0;
  for (double w : omega) s += w * w;
  require(std::abs(std::sqrt(s) - 1.0) <= 1e-12, ErrorCode::InvalidArgument, "direction is not a unit vector");
  if (omega0) {
    require(omega0->size() == omega.size(), ErrorCode::InvalidArgument, "reference direction has wrong length");
    double d = 0.0;
    for (std::size_t i = 0; i < omega.size(); ++i) d += (omega[i] - (*omega0)[i]) * (omega[i] - (*omega0)[i]);
    require(std::sqrt(d) < eps, ErrorCode::InvalidArgument, "direction lies outside the eps-neighbourhood of omega0");
  }
  return Direction{std::move(omega), std::move(omega0), eps};
}

Point Direction::spacetime(double s) const {
  Point p{};
  p[0] = 1.0;
  for (int i = 0; i < n(); ++i) p[i + 1] = s * omega[i];
  return p;
}

SliceQuery SliceQuery::make(Direction dir, const std::vector<double>& zeta) {
  require(static_cast<int>(zeta.size()) == dir.n() + 1, ErrorCode::InvalidArgument, "zeta must have 1+n components");
  SliceQuery q{std::move(dir), make_point(zeta)};
  const double r = dot(q.zeta, q.dir.spacetime(-1.0), q.dir.n() + 1);
  require(std::abs(r) <= 1e-12, ErrorCode::SliceViolation,
          "zeta is not orthogonal to (1,-omega): residual " + std::to_string(r));
  return q;
}

namespace {

struct AmplitudeEvaluator {
  RayIntegrator rays;
  Point d{};
  Point zeta{};
  double sigma = 1.0;
  bool phase = false;
  int dim = 0;

  ComplexJet eval(const Point& p, int order) const {
    const auto r = rays.integrate(p, d, d, 0.0, INFINITY, order);
    double arg = 0.0;
    if (phase) arg = -dot(zeta, p, dim);
    ComplexJet j;
    j.v = std::exp(cplx(sigma * r.value, arg));
    if (order == 0) return j;
    std::array<cplx, kMaxDim> g{};
    for (int i = 0; i < dim; ++i) g[i] = cplx(sigma * r.grad[i], phase ? -zeta[i] : 0.0);
    for (int i = 0; i < dim; ++i) j.d1[i] = j.v * g[i];
    if (order == 1) return j;
    for (int i = 0; i < dim; ++i)
      for (int k = 0; k < dim; ++k) j.d2[i * kMaxDim + k] = j.v * (g[i] * g[k] + sigma * r.hess[i * kMaxDim + k]);
    return j;
  }
};

std::shared_ptr<const AmplitudeEvaluator> evaluator_for(const CovectorField& A, const SliceQuery& q, GOKind kind,
                                                        bool with_phase) {
  auto e = std::make_shared<AmplitudeEvaluator>(AmplitudeEvaluator{RayIntegrator(A)});
  e->dim = A.grid().dim();
  e->d = q.dir.spacetime(-1.0);
  e->zeta = q.zeta;
  e->sigma = kind == GOKind::Growing ? 1.0 : -1.0;
  e->phase = with_phase && kind == GOKind::Growing;
  return e;
}

void check_direction(const CovectorField& A, const Direction& dir) {
  require(dir.n() == A.grid().n_spatial(), ErrorCode::InvalidArgument,
          "direction dimension does not match the grid");
}

GOAmplitude build(const CovectorField& A, const SliceQuery& q, GOKind kind, bool with_phase) {
  check_direction(A, q.dir);
  const auto e = evaluator_for(A, q, kind, with_phase);
  const auto& g = A.grid();
  std::vector<cplx> s(g.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(g.size()); ++i) s[i] = e->eval(g.node(i), 0).v;
  return GOAmplitude(ComplexField(g, std::move(s)), kind, q, with_phase, A);
}

std::vector<double> spacetime_dir(const Direction& dir) {
  std::vector<double> d(dir.n() + 1);
  d[0] = 1.0;
  for (int i = 0; i < dir.n(); ++i) d[i + 1] = -dir.omega[i];
  return d;
}

}  // namespace

GOAmplitude::GOAmplitude(ComplexField B, GOKind kind, SliceQuery query, bool with_phase, CovectorField A)
    : B_(std::move(B)), kind_(kind), query_(std::move(query)), with_phase_(with_phase), A_(std::move(A)) {}

bool GOAmplitude::has_jets() const {
  if (!A_.has_analytic()) return false;
  for (int k = 0; k < A_.size(); ++k)
    if (A_[k].analytic().max_order() < 2) return false;
  return true;
}

ComplexJet GOAmplitude::jet(const Point& p, int order) const {
  require(has_jets(), ErrorCode::PreconditionViolation, "amplitude jets need a closed-form potential");
  return evaluator_for(A_, query_, kind_, with_phase_)->eval(p, order);
}

double ray_integral_halfline(const CovectorField& F, const Point& point, const Direction& omega) {
  check_direction(F, omega);
  const Point d = omega.spacetime(-1.0);
  return RayIntegrator(F).integrate(point, d, d, 0.0, INFINITY, 0).value;
}

GOAmplitude amplitude_growing(const CovectorField& A, const SliceQuery& query, bool with_phase) {
  return build(A, SliceQuery::make(query.dir, std::vector<double>(query.zeta.begin(),
                                                                   query.zeta.begin() + query.dir.n() + 1)),
               GOKind::Growing, with_phase);
}

GOAmplitude amplitude_decaying(const CovectorField& A, const Direction& omega) {
  SliceQuery q{omega, Point{}};
  return build(A, q, GOKind::Decaying, false);
}

namespace {

struct Derivs {
  std::vector<std::vector<cplx>> d1;  // per axis
  std::vector<std::vector<cplx>> d2;  // diagonal second derivatives per axis
};

Derivs fd_derivatives(const ComplexField& B, bool second) {
  const auto& g = B.grid();
  const auto lay = layout_of(g);
  Derivs r;
  for (int a = 0; a < g.dim(); ++a) {
    r.d1.push_back(fd::partial<cplx>(B.vec(), lay, a, g.spacing(a), 4));
    if (second) r.d2.push_back(fd::second<cplx>(B.vec(), lay, a, g.spacing(a)));
  }
  return r;
}

}  // namespace

double transport_residual(const GOAmplitude& B, const CovectorField& A, DerivativeMode mode) {
  require_same_grid(B.B().grid(), A.grid(), "transport_residual");
  const auto& g = A.grid();
  const int dim = g.dim();
  const auto d = spacetime_dir(B.direction());
  const double sigma = B.kind() == GOKind::Growing ? 1.0 : -1.0;
  const bool analytic = mode == DerivativeMode::Analytic;
  if (analytic)
    require(B.has_jets(), ErrorCode::PreconditionViolation,
            "analytic transport residual needs closed-form potential components");
  Derivs fdd;
  std::shared_ptr<const AmplitudeEvaluator> ev;
  if (analytic)
    ev = evaluator_for(A, B.query(), B.kind(), B.with_phase());
  else
    fdd = fd_derivatives(B.B(), false);
  const int margin = analytic ? 1 : 2;
  std::vector<double> res(g.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(g.size()); ++i) {
    const auto idx = g.unravel(i);
    if (g.boundary_distance(idx) < margin) continue;
    const Point p = g.node(i);
    cplx b, dd{};
    double dA = 0.0;
    if (analytic) {
      const ComplexJet j = ev->eval(p, 1);
      b = j.v;
      for (int a = 0; a < dim; ++a) dd += d[a] * j.d1[a];
      for (int a = 0; a < dim; ++a) dA += d[a] * A[a].analytic().value(p);
    } else {
      b = B.B()[i];
      for (int a = 0; a < dim; ++a) dd += d[a] * fdd.d1[a][i];
      for (int a = 0; a < dim; ++a) dA += d[a] * A[a][i];
    }
    res[i] = std::abs(dd + sigma * dA * b) / (1.0 + std::abs(b));
  }
  double m = 0.0;
  for (double r : res) m = std::max(m, r);
  return m;
}

RemainderReport conjugated_remainder(const CovectorField& A, const ScalarField& q, const GOAmplitude& B, double h) {
  require(h > 0.0 && h <= 1.0, ErrorCode::InvalidH, "h must lie in (0, 1]");
  require_same_grid(A.grid(), q.grid(), "conjugated_remainder");
  require_same_grid(A.grid(), B.B().grid(), "conjugated_remainder");
  const auto& g = A.grid();
  const int dim = g.dim();
  const auto d = spacetime_dir(B.direction());
  const double sigma = B.kind() == GOKind::Growing ? 1.0 : -1.0;
  // q̃ for σA: the divergence part flips sign, the quadratic part does not
  const ScalarField qz = effective_potential(A, ScalarField::zeros(g));
  std::vector<double> quad_part(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double s = A[0][i] * A[0][i];
    for (int a = 1; a < dim; ++a) s -= A[a][i] * A[a][i];
    quad_part[i] = s;
  }
  const bool analytic = B.has_jets();
  std::shared_ptr<const AmplitudeEvaluator> ev;
  Derivs fdd;
  if (analytic)
    ev = evaluator_for(A, B.query(), B.kind(), B.with_phase());
  else
    fdd = fd_derivatives(B.B(), true);
  std::vector<double> t1(g.size()), t0(g.size()), tv(g.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(g.size()); ++i) {
    const Point p = g.node(i);
    cplx b, box{};
    std::array<cplx, kMaxDim> grad{};
    if (analytic) {
      const ComplexJet j = ev->eval(p, 2);
      b = j.v;
      grad = j.d1;
      box = j.d2[0];
      for (int a = 1; a < dim; ++a) box -= j.d2[a * kMaxDim + a];
    } else {
      b = B.B()[i];
      for (int a = 0; a < dim; ++a) grad[a] = fdd.d1[a][i];
      box = fdd.d2[0][i];
      for (int a = 1; a < dim; ++a) box -= fdd.d2[a][i];
    }
    std::array<double, kMaxDim> As{};
    for (int a = 0; a < dim; ++a) As[a] = sigma * A[a][i];
    cplx tr{};
    for (int a = 0; a < dim; ++a) tr += d[a] * (grad[a] + As[a] * b);
    const double qs = q[i] + quad_part[i] + sigma * (qz[i] - quad_part[i]);
    cplx lb = box + 2.0 * As[0] * grad[0] + qs * b;
    for (int a = 1; a < dim; ++a) lb -= 2.0 * As[a] * grad[a];
    const cplx c1 = 2.0 * sigma * tr;
    t1[i] = std::norm(c1);
    t0[i] = std::norm(lb);
    tv[i] = std::norm(c1 / h + lb);
  }
  const auto w = quad::trapezoid_weights(g);
  RemainderReport r;
  r.h = h;
  r.value = std::sqrt(quad::weighted_sum(w, tv));
  r.transport = std::sqrt(quad::weighted_sum(w, t1));
  r.leading = std::sqrt(quad::weighted_sum(w, t0));
  return r;
}

}  // namespace lrlab
