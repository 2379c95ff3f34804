#include "lrlab/carleman.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "lrlab/error.hpp"
#include "lrlab/fft.hpp"
#include "lrlab/fields.hpp"
#include "lrlab/finite_difference.hpp"
#include "lrlab/pde.hpp"
#include "lrlab/quadrature.hpp"

namespace lrlab {

namespace {

struct Derivatives {
  std::vector<double> v;
  std::array<std::vector<double>, kMaxDim> d;
  std::vector<double> box;  // ∂_t²u − Δu
};

Derivatives derivatives(const ScalarField& u) {
  const auto& g = u.grid();
  const int dim = g.dim();
  Derivatives out;
  out.v = u.vec();
  for (int a = 0; a < dim; ++a) out.d[a].resize(g.size());
  out.box.resize(g.size());
  if (u.has_analytic() && u.analytic().max_order() >= 2) {
    const auto& f = u.analytic();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(g.size()); ++i) {
      const Jet j = f.eval(g.node(i), 2);
      double b = j.hess(0, 0);
      for (int a = 0; a < dim; ++a) out.d[a][i] = j.grad(a);
      for (int a = 1; a < dim; ++a) b -= j.hess(a, a);
      out.box[i] = b;
    }
    return out;
  }
  const auto lay = layout_of(g);
  for (int a = 0; a < dim; ++a) {
    out.d[a] = fd::partial<double>(u.vec(), lay, a, g.spacing(a));
    const auto s = fd::second<double>(u.vec(), lay, a, g.spacing(a));
    for (std::size_t i = 0; i < g.size(); ++i) out.box[i] += (a == 0 ? 1.0 : -1.0) * s[i];
  }
  return out;
}

std::vector<double> apply_operator(const CovectorField& A, const ScalarField& qt, const Derivatives& D) {
  const int dim = A.size();
  std::vector<double> Lu(D.v.size());
  for (std::size_t i = 0; i < Lu.size(); ++i) {
    double s = D.box[i] + 2.0 * A[0][i] * D.d[0][i] + qt[i] * D.v[i];
    for (int a = 1; a < dim; ++a) s -= 2.0 * A[a][i] * D.d[a][i];
    Lu[i] = s;
  }
  return Lu;
}

double l2_trap(const SpacetimeGrid& g, const std::vector<double>& f) {
  const auto w = quad::trapezoid_weights(g);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i] * f[i];
  return std::sqrt(s);
}

void require_compact(const ScalarField& u, const char* what) {
  const double edge = boundary_layer_max(u, 2);
  require(edge <= 1e-12 * std::max(1.0, u.max_abs()), ErrorCode::SupportViolation,
          std::string(what) + " must vanish on the 2-cell margin of Q (max " + std::to_string(edge) + ")");
}

}  // namespace

CarlemanWeight CarlemanWeight::make(Direction omega, double eps, double h, double h0) {
  require(eps > 0.0, ErrorCode::InvalidArgument, "convexification parameter eps must be positive");
  require(h > 0.0 && h <= h0, ErrorCode::InvalidH, "h must lie in (0, h0]");
  return CarlemanWeight{std::move(omega), eps, h};
}

double CarlemanWeight::phi(const Point& p) const {
  double s = p[0];
  for (int k = 0; k < omega.n(); ++k) s += p[k + 1] * omega.omega[k];
  return s;
}

double CarlemanWeight::phi_tilde(const Point& p) const { return phi(p) - h * p[0] * p[0] / (2.0 * eps); }

void CarlemanWeight::check_order(const SpacetimeGrid& grid) const {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point p = grid.node(i);
    require(phi_tilde(p) <= phi(p), ErrorCode::AssertionFailed, "convexified weight exceeds the linear weight");
  }
}

double torus_norm_scl(const std::vector<cplx>& samples, const std::vector<int>& shape, const std::vector<double>& spacing,
                      double h, int s) {
  require(s == -1 || s == 0 || s == 1, ErrorCode::InvalidArgument, "Sobolev index must be -1, 0 or 1");
  require(shape.size() == spacing.size(), ErrorCode::InvalidArgument, "shape and spacing disagree");
  std::size_t M = 1;
  double vol = 1.0;
  for (std::size_t a = 0; a < shape.size(); ++a) {
    M *= shape[a];
    vol *= spacing[a];
  }
  require(samples.size() == M, ErrorCode::InvalidArgument, "sample count does not match the torus shape");
  std::vector<cplx> U(samples);
  FFT(shape).forward(U);
  double acc = 0.0;
  std::vector<int> idx(shape.size(), 0);
  for (std::size_t i = 0; i < M; ++i) {
    double z2 = 0.0;
    for (std::size_t a = 0; a < shape.size(); ++a) {
      const double z = dft_frequency(idx[a], shape[a], spacing[a]);
      z2 += z * z;
    }
    acc += std::pow(1.0 + h * h * z2, s) * std::norm(U[i]);
    for (int a = static_cast<int>(shape.size()) - 1; a >= 0; --a) {
      if (++idx[a] < shape[a]) break;
      idx[a] = 0;
    }
  }
  return std::sqrt(acc * vol / static_cast<double>(M));
}

double sobolev_norm_scl(const ScalarField& u, double h, int s) {
  require(h > 0.0, ErrorCode::InvalidH, "h must be positive");
  const auto& g = u.grid();
  switch (s) {
    case 0:
      return l2_trap(g, u.vec());
    case 1: {
      const auto D = derivatives(u);
      double grad = 0.0;
      for (int a = 0; a < g.dim(); ++a) {
        const double n = l2_trap(g, D.d[a]);
        grad += n * n;
      }
      return l2_trap(g, u.vec()) + h * std::sqrt(grad);
    }
    case -1: {
      require_compact(u, "u");
      std::vector<int> shape(g.dim());
      std::vector<double> spacing(g.dim());
      std::array<int, kMaxDim> big{};
      for (int a = 0; a < g.dim(); ++a) {
        shape[a] = 2 * g.shape(a);
        big[a] = shape[a];
        spacing[a] = g.spacing(a);
      }
      const auto lay = fd::Layout::row_major(g.dim(), big);
      std::vector<cplx> pad(lay.size(), 0.0);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const auto id = g.unravel(i);
        std::size_t f = 0;
        for (int a = 0; a < g.dim(); ++a) f += id[a] * lay.stride[a];
        pad[f] = u[i];
      }
      return torus_norm_scl(pad, shape, spacing, h, -1);
    }
    default:
      fail(ErrorCode::InvalidArgument, "Sobolev index must be -1, 0 or 1");
  }
}

ScalarField conjugated_operator(const CovectorField& A, const ScalarField& q, const ScalarField& u,
                                const CarlemanWeight& weight, CarlemanOperator op) {
  const auto& g = u.grid();
  require_same_grid(g, A.grid(), "conjugated_operator");
  require_same_grid(g, q.grid(), "conjugated_operator");
  require(weight.omega.n() == g.n_spatial(), ErrorCode::InvalidArgument, "direction dimension does not match the grid");
  const double sigma = op == CarlemanOperator::Direct ? 1.0 : -1.0;
  const CovectorField Ae = op == CarlemanOperator::Direct ? A : scaled(-1.0, A);
  const auto qt = effective_potential(Ae, q);
  const auto D = derivatives(u);
  auto out = apply_operator(Ae, qt, D);
  const double h = weight.h;
  const int dim = g.dim();
  for (std::size_t i = 0; i < out.size(); ++i) {
    double transport = D.d[0][i] + Ae[0][i] * D.v[i];
    for (int a = 1; a < dim; ++a) transport -= weight.omega.omega[a - 1] * (D.d[a][i] + Ae[a][i] * D.v[i]);
    out[i] = h * h * out[i] + 2.0 * sigma * h * transport;
  }
  return ScalarField(g, std::move(out));
}

InteriorRatio interior_estimate_ratio(const CovectorField& A, const ScalarField& q, const ScalarField& u,
                                      const CarlemanWeight& weight, int s, CarlemanOperator op) {
  require(s == 0 || s == -1, ErrorCode::InvalidArgument, "interior estimate index must be 0 or -1");
  require_compact(u, "u");
  const double h = weight.h;
  const auto Lu = conjugated_operator(A, q, u, weight, op);
  InteriorRatio r;
  r.numerator = h * sobolev_norm_scl(u, h, s + 1);
  r.denominator = sobolev_norm_scl(Lu, h, s);
  if (r.denominator == 0.0) {
    r.degenerate = true;
    r.ratio = std::numeric_limits<double>::infinity();
  } else {
    r.ratio = r.numerator / r.denominator;
  }
  return r;
}

EstimateReport boundary_estimate_sides(const CovectorField& A, const ScalarField& q, const ScalarField& u,
                                       const CarlemanWeight& weight) {
  const auto& g = u.grid();
  require_same_grid(g, A.grid(), "boundary_estimate_sides");
  require_same_grid(g, q.grid(), "boundary_estimate_sides");
  const int dim = g.dim(), n = g.n_spatial();
  require(weight.omega.n() == n, ErrorCode::InvalidArgument, "direction dimension does not match the grid");
  const double h = weight.h;
  const auto D = derivatives(u);

  const double tol = 1e-10 * std::max(1.0, u.max_abs());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto id = g.unravel(i);
    if (g.spatial_boundary_distance(id) == 0)
      require(std::abs(D.v[i]) <= tol, ErrorCode::PreconditionViolation, "u does not vanish on the lateral boundary");
    if (id[0] == 0)
      require(std::abs(D.v[i]) <= tol && std::abs(D.d[0][i]) <= tol, ErrorCode::PreconditionViolation,
              "u and its time derivative must vanish at t = 0");
  }

  const auto qt = effective_potential(A, q);
  const auto Lu = apply_operator(A, qt, D);

  double phi_ref = std::numeric_limits<double>::infinity(), phi_all = phi_ref;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double p = weight.phi(g.node(i));
    phi_all = std::min(phi_all, p);
    bool active = D.v[i] != 0.0 || Lu[i] != 0.0;
    for (int a = 0; a < dim; ++a) active = active || D.d[a][i] != 0.0;
    if (active) phi_ref = std::min(phi_ref, p);
  }
  if (!std::isfinite(phi_ref)) phi_ref = phi_all;
  std::vector<double> E(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) E[i] = std::exp(-2.0 * (weight.phi(g.node(i)) - phi_ref) / h);
  const auto w = quad::trapezoid_weights(g);
  double vu = 0, vdt = 0, vgrad = 0, vop = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double gx = 0.0;
    for (int a = 1; a < dim; ++a) gx += D.d[a][i] * D.d[a][i];
    vu += w[i] * E[i] * D.v[i] * D.v[i];
    vdt += w[i] * E[i] * D.d[0][i] * D.d[0][i];
    vgrad += w[i] * E[i] * gx;
    vop += w[i] * E[i] * Lu[i] * Lu[i];
  }

  // t = T slice
  const auto ws = quad::spatial_trapezoid_weights(g);
  const std::size_t last = (g.n_t() - 1) * g.spatial_size();
  double fdt = 0, fu = 0, fgrad = 0;
  for (std::size_t k = 0; k < g.spatial_size(); ++k) {
    const std::size_t i = last + k;
    double gx = 0.0;
    for (int a = 1; a < dim; ++a) gx += D.d[a][i] * D.d[a][i];
    fdt += ws[k] * E[i] * D.d[0][i] * D.d[0][i];
    fu += ws[k] * E[i] * D.v[i] * D.v[i];
    fgrad += ws[k] * E[i] * gx;
  }

  // lateral faces: Σ₊ where ∂_νφ = ω·ν > 0, Σ₋ where it is negative
  double splus = 0, sminus = 0;
  for (int face = 0; face < 2 * n; ++face) {
    const int ax = face_axis(face) + 1;
    const double nu = face_normal_sign(face);
    const double dnphi = nu * weight.omega.omega[ax - 1];
    if (dnphi == 0.0) continue;
    const int fixed = nu < 0 ? 0 : g.shape(ax) - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto id = g.unravel(i);
      if (id[ax] != fixed) continue;
      double wf = 1.0;
      for (int b = 0; b < dim; ++b)
        if (b != ax) wf *= quad::trap_weight(id[b], g.shape(b), g.spacing(b));
      const double dn = nu * D.d[ax][i];
      acc += wf * E[i] * dn * dn;
    }
    if (dnphi > 0)
      splus += dnphi * acc;
    else
      sminus -= dnphi * acc;
  }

  EstimateReport r;
  r.h = h;
  r.log_scale = -2.0 * phi_ref / h;
  r.lhs_terms = {{"sigma_plus_flux", h * splus},
                 {"final_dt", h * fdt},
                 {"volume_u", vu},
                 {"volume_dt", h * h * vdt},
                 {"volume_grad", h * h * vgrad}};
  r.rhs_terms = {{"operator", h * h * vop},
                 {"final_u", fu},
                 {"final_grad", h * fgrad},
                 {"sigma_minus_flux", h * sminus}};
  for (const auto& [k, v] : r.lhs_terms) r.lhs_total += v;
  for (const auto& [k, v] : r.rhs_terms) r.rhs_total += v;
  if (r.rhs_total > 0.0)
    r.ratio = r.lhs_total / r.rhs_total;
  else
    r.ratio = r.lhs_total > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return r;
}

namespace {

BumpSpec family_bump(Point c, Point r, double amp, BumpKind kind) {
  BumpSpec b;
  b.center = c;
  b.radii = r;
  b.amplitude = amp;
  b.kind = kind;
  return b;
}

void finish_growth(SweepSeries& s) {
  s.max_growth = 0.0;
  for (std::size_t k = 0; k < s.ratio.size(); ++k) {
    if (!std::isfinite(s.ratio[k])) {
      s.max_growth = std::numeric_limits<double>::infinity();
      return;
    }
    if (k > 0) s.max_growth = std::max(s.max_growth, s.ratio[k] / s.ratio[k - 1]);
  }
}

}  // namespace

Direction default_carleman_direction() { return Direction::make({std::sqrt(0.5), std::sqrt(0.5)}); }

std::vector<CarlemanCase> default_carleman_family(int n_x) {
  const auto g = SpacetimeGrid::cube(2, 1.0, -1.0, 1.0, n_x, n_x);
  const std::vector<BumpSpec> profiles = {
      family_bump({0.5, 0.0, 0.0}, {0.3, 0.5, 0.5}, 1.0, BumpKind::Smooth),
      family_bump({0.45, 0.2, -0.1}, {0.25, 0.4, 0.5}, 1.0, BumpKind::Polynomial),
      family_bump({0.55, -0.2, 0.1}, {0.3, 0.6, 0.4}, 1.0, BumpKind::GaussianTruncated),
      family_bump({0.5, 0.1, 0.2}, {0.35, 0.3, 0.3}, 1.0, BumpKind::Smooth),
      family_bump({0.5, -0.1, 0.0}, {0.3, 0.7, 0.6}, 1.0, BumpKind::Polynomial)};
  const Point c0{0.5, 0.0, 0.0}, r0{0.3, 0.6, 0.6};
  std::vector<CarlemanCase> out;
  for (double amp : {0.0, 0.5, 1.0}) {
    std::vector<AnalyticField> comps;
    for (int a = 0; a < 3; ++a)
      comps.push_back(bump_field(3, {family_bump(c0, r0, amp * (a == 0 ? 0.4 : -0.3 / a), BumpKind::Smooth)}));
    const auto A = CovectorField::from_analytic(g, comps);
    const auto q = sample(g, bump_field(3, {family_bump(c0, r0, amp * 0.7, BumpKind::Smooth)}));
    for (std::size_t p = 0; p < profiles.size(); ++p)
      out.push_back({"p" + std::to_string(p) + "_" + to_string(profiles[p].kind), amp,
                     sample(g, bump_field(3, {profiles[p]})), A, q});
  }
  return out;
}

SweepSeries boundary_sweep(const CovectorField& A, const ScalarField& q, const ScalarField& u, const Direction& omega,
                           double eps, const std::vector<double>& hs) {
  SweepSeries s;
  for (double h : hs) {
    const auto r = boundary_estimate_sides(A, q, u, CarlemanWeight::make(omega, eps, h));
    if (s.term_names.empty()) {
      for (const auto& [name, v] : r.lhs_terms) s.term_names.push_back(name);
      for (const auto& [name, v] : r.rhs_terms) s.term_names.push_back(name);
    }
    std::vector<double> row;
    for (const auto& [name, v] : r.lhs_terms) row.push_back(v);
    for (const auto& [name, v] : r.rhs_terms) row.push_back(v);
    s.h.push_back(h);
    s.terms.push_back(std::move(row));
    s.ratio.push_back(r.ratio);
  }
  finish_growth(s);
  return s;
}

SweepSeries interior_sweep(const CovectorField& A, const ScalarField& q, const ScalarField& u, const Direction& omega,
                           double eps, const std::vector<double>& hs, int sob, CarlemanOperator op) {
  SweepSeries s;
  s.term_names = {"numerator", "denominator"};
  for (double h : hs) {
    const auto r = interior_estimate_ratio(A, q, u, CarlemanWeight::make(omega, eps, h), sob, op);
    s.h.push_back(h);
    s.terms.push_back({r.numerator, r.denominator});
    s.ratio.push_back(r.ratio);
  }
  finish_growth(s);
  return s;
}

}  // namespace lrlab
