#include "lrlab/rays.hpp"

#include <cmath>

#include "lrlab/fields.hpp"

namespace lrlab {

namespace {

Box nonzero_box(const CovectorField& F) {
  const auto& g = F.grid();
  Box b;
  b.dim = g.dim();
  std::array<int, kMaxDim> lo{}, hi{};
  for (int a = 0; a < g.dim(); ++a) lo[a] = g.shape(a), hi[a] = -1;
  for (std::size_t i = 0; i < g.size(); ++i) {
    bool nz = false;
    for (int k = 0; k < F.size() && !nz; ++k) nz = F[k][i] != 0.0;
    if (!nz) continue;
    const auto idx = g.unravel(i);
    for (int a = 0; a < g.dim(); ++a) lo[a] = std::min(lo[a], idx[a]), hi[a] = std::max(hi[a], idx[a]);
  }
  for (int a = 0; a < g.dim(); ++a) {
    if (hi[a] < 0) {
      b.lo[a] = 1.0;
      b.hi[a] = 0.0;
      continue;
    }
    b.lo[a] = g.coord(a, std::max(lo[a] - 1, 0));
    b.hi[a] = g.coord(a, std::min(hi[a] + 1, g.shape(a) - 1));
  }
  return b;
}

}  // namespace

RayIntegrator::RayIntegrator(const CovectorField& F) : F_(F), dim_(F.grid().dim()) {
  const auto& g = F.grid();
  analytic_ = F.has_analytic();
  if (analytic_) {
    for (int k = 0; k < F.size(); ++k) analytic_ = analytic_ && F[k].analytic().max_order() >= 0;
  }
  if (analytic_) {
    auto s = F.support();
    support_ = s ? *s : g.bounding_box();
    support_.dim = dim_;
  } else {
    support_ = nonzero_box(F);
  }
  step_ = 0.5 * std::min(g.dt(), g.min_dx());
  panel_ = 0.025;
}

RayIntegrator::Result RayIntegrator::integrate(const Point& p, const Point& d, const Point& c, double s0,
                                               double s1, int order) const {
  Result r;
  if (support_.empty()) return r;
  auto [a, b] = support_.clip_line(p, d);
  a = std::max(a, s0);
  b = std::min(b, s1);
  if (!(b > a)) return r;
  const int n = F_.size();
  if (analytic_) {
    const int panels = std::max(2, static_cast<int>(std::ceil((b - a) * norm(d, dim_) / panel_)));
    const double len = (b - a) / panels;
    for (int pn = 0; pn < panels; ++pn) {
      const double mid = a + (pn + 0.5) * len, half = 0.5 * len;
      for (std::size_t q = 0; q < rule_.x.size(); ++q) {
        const double s = mid + half * rule_.x[q];
        const double w = rule_.w[q] * half;
        const Point x = axpy(p, s, d);
        for (int k = 0; k < n; ++k) {
          if (c[k] == 0.0) continue;
          const Jet j = F_[k].analytic().eval(x, order);
          const double cw = c[k] * w;
          r.value += cw * j.v;
          if (order >= 1)
            for (int i = 0; i < dim_; ++i) r.grad[i] += cw * j.d1[i];
          if (order >= 2)
            for (int i = 0; i < dim_; ++i)
              for (int l = 0; l < dim_; ++l) r.hess[i * kMaxDim + l] += cw * j.hess(i, l);
        }
      }
    }
    return r;
  }
  const double dl = norm(d, dim_);
  const int m = std::max(2, static_cast<int>(std::ceil((b - a) * dl / step_)));
  const double h = (b - a) / m;
  for (int i = 0; i <= m; ++i) {
    const Point x = axpy(p, a + i * h, d);
    double v = 0.0;
    for (int k = 0; k < n; ++k)
      if (c[k] != 0.0) v += c[k] * interpolate(F_[k], x);
    r.value += ((i == 0 || i == m) ? 0.5 : 1.0) * h * v;
  }
  return r;
}

}  // namespace lrlab
