#include "lrlab/app/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <Eigen/Core>
#include <fftw3.h>

#include "lrlab/carleman.hpp"
#include "lrlab/fields.hpp"
#include "lrlab/go.hpp"
#include "lrlab/lray.hpp"
#include "lrlab/pde.hpp"
#include "lrlab/recon.hpp"

#ifndef LRLAB_VERSION
#define LRLAB_VERSION "0.0.0"
#endif

namespace lrlab::app {

namespace fs = std::filesystem;
using nlohmann::json;

std::string version() { return LRLAB_VERSION; }

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::MissingReport: return 2;
    case ErrorCode::AssertionFailed: return 3;
    default: return 4;
  }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Step = std::function<void(ScenarioReport&)>;

[[noreturn]] void invalid_at(const std::string& where, const std::string& what) {
  fail(ErrorCode::ConfigInvalid, where + ": " + what);
}

/// Runs f, turning any library error into ConfigInvalid at `where`.
template <class F>
auto at(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigInvalid) throw;
    invalid_at(where, e.what());
  }
}

struct Ctx {
  const ExperimentConfig& cfg;
  const ScenarioSpec& spec;
  Params p;
  FieldLibrary lib;

  Ctx(const ExperimentConfig& c, const ScenarioSpec& s) : cfg(c), spec(s), p(s.params, s.path), lib(c) {}

  GridSpec grid_spec() const {
    if (p.has("grid")) return parse_grid(p.child("grid"));
    if (cfg.grid) return *cfg.grid;
    p.invalid("grid", "no grid given here or at the top level");
  }

  SpacetimeGrid build(const GridSpec& gs, const std::string& where) const {
    return at(where, [&] { return gs.build(); });
  }

  SpacetimeGrid grid() const { return build(grid_spec(), p.where("grid")); }

  std::string name_of(const std::string& key) const {
    const std::string n = p.string(key);
    if (!lib.contains(n)) p.invalid(key, "unknown field \"" + n + "\"");
    return n;
  }

  CovectorField covector(const std::string& key, const SpacetimeGrid& g) const {
    return lib.covector(name_of(key), g, p.where(key));
  }

  CovectorField covector_or_zero(const std::string& key, const SpacetimeGrid& g) const {
    if (!p.has(key)) {
      std::vector<AnalyticField> z(g.dim(), AnalyticField::zero(g.dim()));
      return CovectorField::from_analytic(g, z);
    }
    return covector(key, g);
  }

  ScalarField scalar(const std::string& key, const SpacetimeGrid& g) const {
    return lib.scalar(name_of(key), g, p.where(key));
  }

  ScalarField scalar_or_zero(const std::string& key, const SpacetimeGrid& g) const {
    if (!p.has(key)) return sample(g, AnalyticField::zero(g.dim()));
    return scalar(key, g);
  }

  std::vector<double> unit_or(const std::string& key, int n, std::vector<double> def) const {
    return p.has(key) ? p.unit_vector(key, n) : def;
  }

  Direction direction(const std::string& key, int n, std::vector<double> def) const {
    const auto w = unit_or(key, n, std::move(def));
    return at(p.where(key), [&] { return Direction::make(w); });
  }

  Params tol() const { return p.child("tolerances"); }

  PocsOptions pocs() const {
    const Params q = p.child("pocs");
    PocsOptions o;
    o.max_iter = q.integer("max_iter", o.max_iter);
    o.tol = q.number("tol", o.tol);
    o.relaxation = q.number("relaxation", o.relaxation);
    if (o.max_iter < 1) q.invalid("max_iter", "must be at least 1");
    if (!(o.relaxation > 0.0 && o.relaxation < 2.0)) q.invalid("relaxation", "must lie in (0, 2)");
    if (!(o.tol >= 0.0)) q.invalid("tol", "must be non-negative");
    return o;
  }

  std::vector<double> h_values(std::vector<double> def) const {
    auto hs = p.numbers("hs", std::move(def));
    if (hs.empty()) p.invalid("hs", "must not be empty");
    for (double h : hs)
      if (!(h > 0.0)) p.invalid("hs", "every h must be positive");
    return hs;
  }
};

std::vector<double> first_axis(int n) {
  std::vector<double> w(n, 0.0);
  w[0] = 1.0;
  return w;
}

double order_between(double coarse, double fine, double ratio) {
  if (coarse == 0.0) return kInf;
  return std::log(coarse / fine) / std::log(ratio);
}

/// Grid with every spatial axis at `n` samples and the time axis scaled to keep dt/dx.
GridSpec level_grid(const GridSpec& base, int n) {
  GridSpec g = base;
  const double factor = static_cast<double>(n - 1) / (base.n_x[0] - 1);
  for (int a = 0; a < g.n_spatial; ++a) g.n_x[a] = static_cast<int>(std::lround((base.n_x[a] - 1) * factor)) + 1;
  g.n_t = static_cast<int>(std::ceil((base.n_t - 1) * factor - 1e-9)) + 1;
  return g;
}

Probe plane_wave_probe(const std::vector<double>& omega, double kappa, double phase) {
  auto arg = [omega, kappa, phase](const Point& p) {
    double s = -p[0];
    for (std::size_t a = 0; a < omega.size(); ++a) s += omega[a] * p[a + 1];
    return kappa * s + phase;
  };
  return {[arg](const Point& p) { return std::sin(arg(p)); },
          [arg, kappa](const Point& p) { return -kappa * std::cos(arg(p)); }};
}

struct ProbeSpec {
  Probe probe;
  std::vector<double> omega;
};

ProbeSpec parse_probe(const Ctx& c, int n) {
  const Params pp = c.p.child("probe");
  ProbeSpec s;
  s.omega = pp.has("omega") ? pp.unit_vector("omega", n) : first_axis(n);
  const double kappa = pp.number("kappa", 2.0 * std::numbers::pi);
  const double phase = pp.number("phase", 0.0);
  s.probe = plane_wave_probe(s.omega, kappa, phase);
  return s;
}

BoundaryRegions parse_region(const Ctx& c, int n, const std::vector<double>& def) {
  const auto w = c.unit_or("region_omega", n, def);
  return at(c.p.where("region_omega"), [&] { return BoundaryRegions::from_direction(n, w); });
}

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double lambda_sup(const LambdaData& l) {
  double m = sup_norm(l.final_u);
  m = std::max(m, sup_norm(l.final_dtu));
  for (const auto& t : l.neumann_G) m = std::max(m, sup_norm(t.values));
  return m;
}

void add_pocs_table(ScenarioReport& r, const std::string& name, const std::vector<PocsLogEntry>& log) {
  auto& t = r.table(name, {"iter", "cone_misfit", "support_leak", "increment"});
  for (const auto& e : log) t.rows.push_back({static_cast<double>(e.iter), e.cone_misfit, e.support_leak, e.increment});
}

double misfit_rise(const std::vector<PocsLogEntry>& log) {
  double worst = 0.0;
  for (std::size_t k = 1; k < log.size(); ++k)
    if (log[k - 1].cone_misfit > 0.0) worst = std::max(worst, log[k].cone_misfit / log[k - 1].cone_misfit);
  return worst;
}

Box padded(Box b, double pad) {
  for (int a = 0; a < b.dim; ++a) {
    b.lo[a] -= pad;
    b.hi[a] += pad;
  }
  return b;
}

std::optional<Box> support_of(const ScalarField& q) {
  if (!q.has_analytic()) return std::nullopt;
  return q.analytic().support();
}

double relative_l2(const TwoFormField& a, const TwoFormField& b) {
  double num = 0.0, den = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = i + 1; j < a.dim(); ++j)
      for (std::size_t k = 0; k < a.grid().size(); ++k) {
        num += std::pow(a.upper(i, j)[k] - b.upper(i, j)[k], 2);
        den += std::pow(b.upper(i, j)[k], 2);
      }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double two_form_sup(const TwoFormField& h) {
  double m = 0.0;
  for (int i = 0; i < h.dim(); ++i)
    for (int j = i + 1; j < h.dim(); ++j) m = std::max(m, h.upper(i, j).max_abs());
  return m;
}

double covector_sup(const CovectorField& F) {
  double m = 0.0;
  for (int a = 0; a < F.size(); ++a) m = std::max(m, F[a].max_abs());
  return m;
}

double l2(const ScalarField& u) {
  double s = 0.0;
  for (double x : u.vec()) s += x * x;
  return std::sqrt(s);
}

double l2_diff(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

/// Either `key` directly or the difference `key2 − key1` of two named fields.
CovectorField difference_form(const Ctx& c, const SpacetimeGrid& g) {
  if (c.p.has("F")) return c.covector("F", g);
  if (!c.p.has("A1") || !c.p.has("A2")) c.p.invalid("F", "give either F or both A1 and A2");
  return add(c.covector("A2", g), scaled(-1.0, c.covector("A1", g)));
}

ScalarField difference_scalar(const Ctx& c, const SpacetimeGrid& g) {
  if (c.p.has("q")) return c.scalar("q", g);
  if (!c.p.has("q1") && !c.p.has("q2")) c.p.invalid("q", "give either q or q1 and q2");
  return linear_combination(1.0, c.scalar_or_zero("q2", g), -1.0, c.scalar_or_zero("q1", g));
}

std::vector<bool> mask_around(const Ctx& c, const SpacetimeGrid& g, std::optional<Box> support, double pad) {
  if (!support) c.p.invalid("mask_pad", "the field has no bounded closed-form support to build a mask from");
  return at(c.p.where("mask_pad"), [&] { return support_mask(g, padded(*support, pad)); });
}

void apply_baseline(const json& baseline, double rtol, ScenarioReport& r) {
  for (auto it = baseline.begin(); it != baseline.end(); ++it) {
    double value = std::nan("");
    for (const auto& [k, v] : r.metrics)
      if (k == it.key()) value = v;
    const double ref = it.value().get<double>();
    const double dev = ref == 0.0 ? std::abs(value) : std::abs(value - ref) / std::abs(ref);
    r.check("baseline_" + it.key(), dev, "<=", rtol);
  }
}

// ---------------------------------------------------------------------------------------------

Step prepare_forward(const Ctx& c) {
  const auto g = c.grid();
  const int n = g.n_spatial();
  const auto A = c.covector_or_zero("A", g);
  const auto q = c.scalar_or_zero("q", g);
  const auto probe = parse_probe(c, n);
  const auto region = parse_region(c, n, probe.omega);
  const double max_u = c.tol().number("max_abs_u", 1e6);
  const bool has_drift = c.tol().has("energy_drift");
  const double drift_tol = has_drift ? c.tol().number("energy_drift") : 0.0;
  at(c.p.where("grid"), [&] {
    const double cfl = cfl_number(g);
    require(cfl <= 1.0, ErrorCode::CflViolation, "CFL number " + std::to_string(cfl) + " exceeds 1");
    return 0;
  });
  return [=](ScenarioReport& r) {
    const auto init = initial_from<double>(g, probe.probe.u, probe.probe.dt_u);
    const auto f = dirichlet_from<double>(g, probe.probe.u);
    const auto state = solve_ibvp(A, q, init, f, g);
    const auto lam = lambda_from_state(state, region);
    const auto energy = discrete_energy(state, q);
    double lo = kInf, hi = 0.0;
    auto& t = r.table("energy", {"t_mid", "energy"});
    for (std::size_t m = 0; m < energy.size(); ++m) {
      t.rows.push_back({(m + 0.5) * g.dt(), energy[m]});
      lo = std::min(lo, energy[m]);
      hi = std::max(hi, energy[m]);
    }
    const double drift = hi > 0.0 ? (hi - lo) / hi : 0.0;
    r.metric("cfl", state.cfl);
    r.metric("max_abs_u", sup_norm(state.u));
    r.metric("lambda_sup", lambda_sup(lam));
    r.metric("neumann_faces", static_cast<double>(lam.neumann_G.size()));
    r.metric("energy_drift", drift);
    r.check("state_bounded", sup_norm(state.u), "<=", max_u);
    if (has_drift) r.check("energy_drift", drift, "<=", drift_tol);
  };
}

Step prepare_gauge_check(const Ctx& c) {
  const GridSpec base = c.grid_spec();
  const int n = base.n_spatial;
  std::string a_key = "A", phi_name;
  if (c.p.has("A2")) {
    const std::string a2 = c.name_of("A2");
    const FieldSpec& f = c.cfg.fields.at(a2);
    if (f.gauge_of.empty()) c.p.invalid("A2", "field \"" + a2 + "\" must be declared with gauge_of and phi");
    if (c.p.has("A1") && c.name_of("A1") != f.gauge_of)
      c.p.invalid("A1", "field \"" + a2 + "\" is declared as a gauge of \"" + f.gauge_of + "\"");
    phi_name = f.phi;
    a_key = "";
  }
  const std::string a_name = a_key.empty() ? c.cfg.fields.at(c.p.string("A2")).gauge_of : c.name_of("A");
  if (phi_name.empty()) phi_name = c.name_of("phi");

  std::vector<int> levels;
  if (c.p.has("levels")) {
    for (double v : c.p.numbers("levels")) {
      if (v != std::floor(v) || v < 5) c.p.invalid("levels", "expected integers >= 5");
      levels.push_back(static_cast<int>(v));
    }
  } else {
    levels.push_back(base.n_x[0]);
  }
  const auto probe = parse_probe(c, n);
  const auto region = parse_region(c, n, probe.omega);
  const double lambda_max = c.tol().number("lambda_max", 3e-2);
  const double min_order = c.tol().number("min_order", 1.5);

  struct Level {
    int n_x;
    CovectorField A;
    ScalarField q;
    GaugeFunction phi;
  };
  std::vector<Level> L;
  for (int nx : levels) {
    const auto g = c.build(level_grid(base, nx), c.p.where("levels"));
    Level lv{nx, c.lib.covector(a_name, g, c.p.where("A")), c.scalar_or_zero("q", g),
             at(c.p.where("phi"), [&] { return GaugeFunction(c.lib.scalar(phi_name, g, c.p.where("phi"))); })};
    at(c.p.where("levels"), [&] {
      const double cfl = cfl_number(g);
      require(cfl <= 1.0, ErrorCode::CflViolation, "CFL number " + std::to_string(cfl) + " exceeds 1");
      return 0;
    });
    L.push_back(std::move(lv));
  }
  return [=](ScenarioReport& r) {
    auto& t = r.table("levels", {"n_x", "u_discrepancy", "lambda_discrepancy"});
    std::vector<double> du, dl;
    for (const auto& lv : L) {
      const auto rep = gauge_equivalence_check(lv.A, lv.q, lv.phi, probe.probe, region, false);
      du.push_back(rep.u_discrepancy);
      dl.push_back(rep.lambda_discrepancy);
      t.rows.push_back({static_cast<double>(lv.n_x), rep.u_discrepancy, rep.lambda_discrepancy});
    }
    r.metric("u_discrepancy", du[0]);
    r.metric("lambda_discrepancy", dl[0]);
    r.check("lambda_discrepancy", dl[0], "<=", lambda_max);
    if (L.size() > 1) {
      double ou = kInf, ol = kInf;
      for (std::size_t k = 0; k + 1 < L.size(); ++k) {
        const double ratio = static_cast<double>(L[k + 1].n_x - 1) / (L[k].n_x - 1);
        ou = std::min(ou, order_between(du[k], du[k + 1], ratio));
        ol = std::min(ol, order_between(dl[k], dl[k + 1], ratio));
      }
      r.metric("u_order", ou);
      r.metric("lambda_order", ol);
      r.check("lambda_order", ol, ">=", min_order);
    }
  };
}

Step prepare_go_check(const Ctx& c) {
  const auto g = c.grid();
  const int n = g.n_spatial();
  const auto A = c.covector("A", g);
  const auto q = c.scalar_or_zero("q", g);
  const auto omega = c.direction("omega", n, first_axis(n));
  const auto zeta = c.p.numbers("zeta", std::vector<double>(n + 1, 0.0));
  if (static_cast<int>(zeta.size()) != n + 1) c.p.invalid("zeta", "expected 1 + n_spatial entries");
  const auto query = at(c.p.where("zeta"), [&] { return SliceQuery::make(omega, zeta); });
  const auto hs = c.h_values({0.1, 0.05, 0.025});
  const std::string mode = c.p.string("derivatives", "analytic");
  if (mode != "analytic" && mode != "finite-difference") c.p.invalid("derivatives", "expected analytic or finite-difference");
  const auto dmode = mode == "analytic" ? DerivativeMode::Analytic : DerivativeMode::FiniteDifference;
  if (dmode == DerivativeMode::Analytic && !A.has_analytic()) c.p.invalid("A", "analytic derivatives need closed-form fields");
  const double transport_max = c.tol().number("transport_max", 1e-6);
  const double plateau_max = c.tol().number("plateau_variation", 0.1);
  return [=](ScenarioReport& r) {
    const auto Bg = amplitude_growing(A, query);
    const auto Bd = amplitude_decaying(A, omega);
    const double rg = transport_residual(Bg, A, dmode);
    const double rd = transport_residual(Bd, A, dmode);
    auto& t = r.table("remainder", {"h", "growing_value", "growing_transport", "growing_leading", "decaying_value",
                                    "decaying_transport", "decaying_leading"});
    double glo = kInf, ghi = 0.0, dlo = kInf, dhi = 0.0;
    for (double h : hs) {
      const auto a = conjugated_remainder(A, q, Bg, h);
      const auto b = conjugated_remainder(A, q, Bd, h);
      t.rows.push_back({h, a.value, a.transport, a.leading, b.value, b.transport, b.leading});
      glo = std::min(glo, a.value);
      ghi = std::max(ghi, a.value);
      dlo = std::min(dlo, b.value);
      dhi = std::max(dhi, b.value);
    }
    const double gv = ghi > 0.0 ? (ghi - glo) / ghi : 0.0;
    const double dv = dhi > 0.0 ? (dhi - dlo) / dhi : 0.0;
    r.metric("transport_growing", rg);
    r.metric("transport_decaying", rd);
    r.metric("plateau_variation_growing", gv);
    r.metric("plateau_variation_decaying", dv);
    r.check("transport_growing", rg, "<=", transport_max);
    r.check("transport_decaying", rd, "<=", transport_max);
    r.check("plateau_variation_growing", gv, "<=", plateau_max);
    r.check("plateau_variation_decaying", dv, "<=", plateau_max);
  };
}

Step prepare_slice_check(const Ctx& c) {
  const auto g = c.grid();
  const int n = g.n_spatial();
  if (n < 2) c.p.invalid("grid", "space-like slice frequencies need n_spatial >= 2");
  const auto field = c.scalar("field", g);
  const auto support = support_of(field);
  if (!support) c.p.invalid("field", "needs a bounded closed-form support");
  const auto omega = c.direction("omega", n, first_axis(n));
  const int count = c.p.integer("count", 50);
  const double radius = c.p.number("xi_radius", 6.0);
  const double xi_min = c.p.number("xi_min", 0.5);
  if (count < 0) c.p.invalid("count", "must be non-negative");
  if (!(radius > xi_min && xi_min > 0.0)) c.p.invalid("xi_radius", "need xi_radius > xi_min > 0");
  const double spacing = c.p.number("spacing", 0.03);
  if (!(spacing > 0.0)) c.p.invalid("spacing", "must be positive");
  const double rel_max = c.tol().number("rel_max", 1e-4);
  const int rays = c.p.integer("null_rays", 0);
  std::optional<CovectorField> grad;
  if (rays > 0) {
    const auto phi = c.lib.scalar_closed_form(c.name_of("phi"), g.dim(), c.p.where("phi"));
    std::vector<AnalyticField> comps;
    for (int a = 0; a < g.dim(); ++a) comps.push_back(phi.partial(a));
    grad = CovectorField::from_analytic(g, comps);
  }
  const double null_max = c.tol().number("null_max", 1e-8);
  const std::uint64_t seed = c.cfg.seed;
  return [=](ScenarioReport& r) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<Point> zetas;
    while (static_cast<int>(zetas.size()) < count) {
      Point xi{};
      double s = 0.0;
      for (int a = 0; a < n; ++a) {
        xi[a] = radius * U(rng);
        s += xi[a] * xi[a];
      }
      const double norm_xi = std::sqrt(s);
      if (norm_xi > radius || norm_xi < xi_min) continue;
      double dot_w = 0.0;
      for (int a = 0; a < n; ++a) dot_w += xi[a] * omega.omega[a];
      if (std::abs(dot_w) > 0.95 * norm_xi) continue;
      Point z{};
      z[0] = -dot_w;
      for (int a = 0; a < n; ++a) z[a + 1] = xi[a];
      zetas.push_back(z);
    }
    const auto frame = HyperplaneFrame::make(omega, *support, spacing);
    const auto slice = fourier_slice(field, frame, zetas);
    std::vector<std::string> cols{"k", "tau"};
    for (int a = 0; a < n; ++a) cols.push_back("xi" + std::to_string(a + 1));
    for (const char* s : {"slice_re", "slice_im", "dft_re", "dft_im", "rel_error"}) cols.push_back(s);
    auto& t = r.table("samples", cols);
    double worst = 0.0;
    for (std::size_t k = 0; k < zetas.size(); ++k) {
      const cplx ref = direct_dft(field, zetas[k]);
      const double rel = std::abs(slice[k].value - ref) / std::abs(ref);
      worst = std::max(worst, rel);
      std::vector<double> row{static_cast<double>(k)};
      for (int a = 0; a <= n; ++a) row.push_back(zetas[k][a]);
      for (double v : {slice[k].value.real(), slice[k].value.imag(), ref.real(), ref.imag(), rel}) row.push_back(v);
      t.rows.push_back(std::move(row));
    }
    r.metric("samples", static_cast<double>(zetas.size()));
    r.metric("max_rel_error", worst);
    if (count > 0) r.check("slice_rel_error", worst, "<=", rel_max);
    if (grad) {
      const Box box = g.bounding_box();
      double worst_null = 0.0;
      auto& tn = r.table("null_rays", {"k", "value"});
      for (int k = 0; k < rays; ++k) {
        Point base{};
        for (int a = 0; a < g.dim(); ++a) base[a] = box.lo[a] + 0.5 * (U(rng) + 1.0) * (box.hi[a] - box.lo[a]);
        std::vector<double> w(n);
        double s = 0.0;
        do {
          s = 0.0;
          for (int a = 0; a < n; ++a) {
            w[a] = U(rng);
            s += w[a] * w[a];
          }
        } while (s < 1e-4 || s > 1.0);
        for (double& x : w) x /= std::sqrt(s);
        const double v = light_ray_transform(*grad, Ray{base, Direction::make(w)});
        worst_null = std::max(worst_null, std::abs(v));
        tn.rows.push_back({static_cast<double>(k), v});
      }
      r.metric("null_space_max", worst_null);
      r.check("null_space", worst_null, "<=", null_max);
    }
  };
}

ReconConfig recon_config(const Ctx& c) {
  ReconConfig rc;
  rc.pocs = c.pocs();
  rc.spacelike_margin = c.p.number("margin", rc.spacelike_margin);
  if (!(rc.spacelike_margin > 0.0 && rc.spacelike_margin < 1.0)) c.p.invalid("margin", "must lie in (0, 1)");
  rc.tilt_angles = c.p.numbers("tilt_angles", rc.tilt_angles);
  rc.slice_spacing = c.p.number("slice_spacing", rc.slice_spacing);
  return rc;
}

std::unique_ptr<RayDataProvider> make_provider(const std::string& kind, const CovectorField& F, double spacing) {
  if (kind == "line") return std::make_unique<LineIntegralRayData>(F, spacing);
  return std::make_unique<FieldSpectrumRayData>(F);
}

Step prepare_curvature(const Ctx& c) {
  const auto g = c.grid();
  const auto F = difference_form(c, g);
  const auto rc = recon_config(c);
  const std::string provider = c.p.string("provider", "spectral");
  if (provider != "spectral" && provider != "line") c.p.invalid("provider", "expected spectral or line");
  const auto mask = mask_around(c, g, F.support(), c.p.number("mask_pad", 0.02));
  std::optional<CovectorField> shifted;
  if (c.p.has("gauge_phi")) {
    const auto phi = c.lib.scalar_closed_form(c.name_of("gauge_phi"), g.dim(), c.p.where("gauge_phi"));
    std::vector<AnalyticField> comps;
    for (int a = 0; a < g.dim(); ++a) comps.push_back(phi.partial(a));
    shifted = add(F, CovectorField::from_analytic(g, comps));
  }
  const double rel_max = c.tol().number("rel_error_max", 5e-2);
  const double gauge_max = c.tol().number("gauge_shift_max", 1e-3);
  return [=](ScenarioReport& r) {
    const auto res = recover_curvature(*make_provider(provider, F, rc.slice_spacing), mask, rc);
    const auto dF = exterior_derivative(F);
    const double err = relative_l2(res.h, dF);
    r.metric("rel_error", err);
    r.metric("spacelike_count", res.spacelike_count);
    r.metric("max_condition", res.max_condition);
    r.metric("max_asymmetry", res.max_asymmetry);
    r.metric("converged", res.converged ? 1.0 : 0.0);
    r.metric("iterations", static_cast<double>(res.worst_log.size()));
    add_pocs_table(r, "pocs", res.worst_log);
    r.check("curvature_rel_error", err, "<=", rel_max);
    if (shifted) {
      const auto res2 = recover_curvature(*make_provider(provider, *shifted, rc.slice_spacing), mask, rc);
      const double shift = relative_l2(res2.h, res.h);
      r.metric("gauge_shift", shift);
      r.check("gauge_shift", shift, "<=", gauge_max);
    }
  };
}

Step prepare_q(const Ctx& c) {
  const auto g = c.grid();
  const auto q = difference_scalar(c, g);
  const auto rc = recon_config(c);
  std::optional<Box> support = support_of(q);
  if (!support && c.p.has("q1")) support = support_of(c.scalar("q1", g));
  const auto mask = mask_around(c, g, support, c.p.number("mask_pad", 0.1));
  const double rel_max = c.tol().number("rel_error_max", 0.1);
  const double rise_max = c.tol().number("misfit_rise_max", 1.0 + 1e-9);
  return [=](ScenarioReport& r) {
    const auto res = recover_q(spectral_cone_data(q, rc.spacelike_margin), g, mask, rc);
    const double ref = l2(q);
    const double err = ref > 0.0 ? l2_diff(res.field, q) / ref : l2(res.field);
    r.metric("rel_error", err);
    r.metric("reference_norm", ref);
    r.metric("iterations", static_cast<double>(res.log.size()));
    r.metric("converged", res.converged ? 1.0 : 0.0);
    if (!res.log.empty()) {
      r.metric("initial_misfit", res.log.front().cone_misfit);
      r.metric("final_misfit", res.log.back().cone_misfit);
    }
    add_pocs_table(r, "pocs", res.log);
    r.check("q_rel_error", err, "<=", rel_max);
    r.check("misfit_monotone", misfit_rise(res.log), "<=", rise_max);
  };
}

Step prepare_full_pipeline(const Ctx& c) {
  const auto g = c.grid();
  const auto A1 = c.covector("A1", g);
  const auto A2 = c.covector("A2", g);
  const auto F = add(A2, scaled(-1.0, A1));
  const auto q1 = c.scalar_or_zero("q1", g), q2 = c.scalar_or_zero("q2", g);
  const auto dq = linear_combination(1.0, q2, -1.0, q1);
  const auto rc = recon_config(c);
  std::optional<Box> box = F.support();
  for (const auto& s : {support_of(q1), support_of(q2)})
    if (s) box = box ? Box::merge(*box, *s) : *s;
  if (!box) c.p.invalid("A1", "the coefficient differences have no closed-form support");
  const auto mask_A = mask_around(c, g, box, c.p.number("mask_pad", 0.02));
  const auto mask_q = mask_around(c, g, box, c.p.number("mask_pad_q", 0.1));
  std::optional<ScalarField> phi;
  const FieldSpec& a2 = c.cfg.fields.at(c.p.string("A2"));
  if (!a2.gauge_of.empty() && a2.gauge_of == c.p.string("A1")) phi = c.lib.scalar(a2.phi, g, "fields." + c.p.string("A2") + ".phi");
  const double curv_max = c.tol().number("curvature_max", 1e-3);
  const double phi_max = c.tol().number("phi_max", 1e-5);
  const double q_max = c.tol().number("q_max", 1e-3);
  return [=](ScenarioReport& r) {
    const double scale = std::max(covector_sup(A1), covector_sup(A2));
    const auto res = recover_curvature(FieldSpectrumRayData(F), mask_A, rc);
    const double curv = scale > 0.0 ? two_form_sup(res.h) / scale : two_form_sup(res.h);
    r.metric("curvature_sup_rel", curv);
    r.metric("curvature_true_sup_rel", scale > 0.0 ? two_form_sup(exterior_derivative(F)) / scale : 0.0);
    add_pocs_table(r, "curvature_pocs", res.worst_log);
    r.check("curvature_vanishes", curv, "<=", curv_max);
    if (phi) {
      const auto rec = poincare_integrate(F);
      const double ref = phi->max_abs();
      double e = 0.0;
      for (std::size_t k = 0; k < g.size(); ++k) e = std::max(e, std::abs(rec.phi()[k] - (*phi)[k]));
      const double rel = ref > 0.0 ? e / ref : e;
      r.metric("phi_sup_rel_error", rel);
      r.check("gauge_recovered", rel, "<=", phi_max);
    }
    const auto qr = recover_q(spectral_cone_data(dq, rc.spacelike_margin), g, mask_q, rc);
    const double qscale = std::max(l2(q1), l2(q2));
    const double qerr = qscale > 0.0 ? l2(qr.field) / qscale : l2(qr.field);
    r.metric("q_difference_rel", qerr);
    r.metric("q_true_difference_rel", qscale > 0.0 ? l2(dq) / qscale : l2(dq));
    add_pocs_table(r, "q_pocs", qr.log);
    r.check("q_difference_vanishes", qerr, "<=", q_max);
  };
}

std::string amp_label(std::size_t j) { return "a" + std::to_string(j); }

Step prepare_carleman(const Ctx& c) {
  const std::string mode = c.p.string("mode", "boundary");
  if (mode != "boundary" && mode != "interior") c.p.invalid("mode", "expected boundary or interior");
  const int s = c.p.integer("s", 0);
  if (s != 0 && s != -1) c.p.invalid("s", "expected 0 or -1");
  const std::string op_name = c.p.string("operator", "direct");
  if (op_name != "direct" && op_name != "adjoint") c.p.invalid("operator", "expected direct or adjoint");
  const auto op = op_name == "direct" ? CarlemanOperator::Direct : CarlemanOperator::Adjoint;
  const double eps = c.p.number("eps", 0.5);
  if (!(eps > 0.0)) c.p.invalid("eps", "must be positive");
  const auto hs = c.h_values({0.2, 0.1, 0.05, 0.025});
  const double growth_max = c.tol().number("growth_max", 1.25);

  std::vector<CarlemanCase> cases;
  Direction omega;
  const std::string family = c.p.string("family", "default");
  if (family == "default") {
    const int nx = c.p.integer("n_x", 41);
    if (nx < 21) c.p.invalid("n_x", "the default family needs at least 21 samples per axis");
    cases = at(c.p.where("n_x"), [&] { return default_carleman_family(nx); });
    omega = c.direction("omega", 2, default_carleman_direction().omega);
  } else if (family == "custom") {
    const auto g = c.grid();
    omega = c.direction("omega", g.n_spatial(), std::vector<double>(g.n_spatial(), 1.0 / std::sqrt(g.n_spatial())));
    const auto profiles = c.p.raw().contains("profiles") ? c.p.raw().at("profiles") : json();
    if (!profiles.is_array() || profiles.empty()) c.p.invalid("profiles", "expected a non-empty array of field names");
    const auto amps = c.p.numbers("amplitudes", std::vector<double>{0.0, 0.5, 1.0});
    const auto A = c.covector_or_zero("A", g);
    const auto q = c.scalar_or_zero("q", g);
    for (double amp : amps)
      for (std::size_t k = 0; k < profiles.size(); ++k) {
        const std::string where = c.p.where("profiles[" + std::to_string(k) + "]");
        if (!profiles[k].is_string()) invalid_at(where, "expected a field name");
        const std::string name = profiles[k].get<std::string>();
        cases.push_back({name, amp, c.lib.scalar(name, g, where), scaled(amp, A), scaled(amp, q)});
      }
  } else {
    c.p.invalid("family", "expected default or custom");
  }
  at(c.p.where("hs"), [&] {
    for (double h : hs) (void)CarlemanWeight::make(omega, eps, h);
    return 0;
  });
  return [=](ScenarioReport& r) {
    double worst = 0.0, max_ratio = 0.0, min_ratio = kInf;
    auto& summary = r.table("growth", {"case", "amplitude", "max_growth"});
    std::vector<double> amps;
    for (std::size_t k = 0; k < cases.size(); ++k) {
      const auto& cs = cases[k];
      std::size_t j = 0;
      while (j < amps.size() && amps[j] != cs.amplitude) ++j;
      if (j == amps.size()) amps.push_back(cs.amplitude);
      const SweepSeries sw = mode == "boundary" ? boundary_sweep(cs.A, cs.q, cs.u, omega, eps, hs)
                                                : interior_sweep(cs.A, cs.q, cs.u, omega, eps, hs, s, op);
      std::vector<std::string> cols{"h"};
      for (const auto& t : sw.term_names) cols.push_back(t);
      cols.push_back("ratio");
      auto& t = r.table(cs.label + "_" + amp_label(j), cols);
      for (std::size_t i = 0; i < sw.h.size(); ++i) {
        std::vector<double> row{sw.h[i]};
        row.insert(row.end(), sw.terms[i].begin(), sw.terms[i].end());
        row.push_back(sw.ratio[i]);
        t.rows.push_back(std::move(row));
        max_ratio = std::max(max_ratio, sw.ratio[i]);
        min_ratio = std::min(min_ratio, sw.ratio[i]);
      }
      summary.rows.push_back({static_cast<double>(k), cs.amplitude, sw.max_growth});
      worst = std::max(worst, sw.max_growth);
    }
    r.metric("cases", static_cast<double>(cases.size()));
    r.metric("max_ratio", max_ratio);
    r.metric("min_ratio", min_ratio);
    r.metric("max_growth", worst);
    r.check("ratios_finite", std::isfinite(max_ratio) ? 1.0 : 0.0, "==", 1.0);
    r.check("growth_per_halving", worst, "<=", growth_max);
  };
}

Step prepare_type(const Ctx& c) {
  const auto& type = c.spec.type;
  if (type == "forward") return prepare_forward(c);
  if (type == "gauge-check") return prepare_gauge_check(c);
  if (type == "go-check") return prepare_go_check(c);
  if (type == "slice-check") return prepare_slice_check(c);
  if (type == "curvature-recon") return prepare_curvature(c);
  if (type == "q-recon") return prepare_q(c);
  if (type == "full-pipeline") return prepare_full_pipeline(c);
  if (type == "carleman-sweep") return prepare_carleman(c);
  invalid_at(c.spec.path + ".type", "unknown scenario type \"" + type + "\"");
}

Step prepare(const ExperimentConfig& cfg, const ScenarioSpec& spec) {
  const Ctx c(cfg, spec);
  Step step = prepare_type(c);
  if (!c.p.has("baseline")) return step;
  const json& b = spec.params.at("baseline");
  if (!b.is_object()) c.p.invalid("baseline", "expected an object of metric values");
  for (auto it = b.begin(); it != b.end(); ++it)
    if (!it.value().is_number()) c.p.invalid("baseline." + it.key(), "expected a number");
  const double rtol = c.p.number("baseline_rtol", 1e-9);
  return [step, b, rtol](ScenarioReport& r) {
    step(r);
    apply_baseline(b, rtol, r);
  };
}

ScenarioReport execute(const ScenarioSpec& spec, const Step& step) {
  ScenarioReport r;
  r.name = spec.name;
  r.type = spec.type;
  try {
    step(r);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigInvalid) throw;
    r.status = e.code() == ErrorCode::AssertionFailed ? Status::AssertionFailed : Status::NumericalFailure;
    r.error = e.what();
  } catch (const std::exception& e) {
    r.status = Status::NumericalFailure;
    r.error = e.what();
  }
  for (const auto& [k, v] : r.metrics)
    if (!std::isfinite(v) && r.status == Status::Passed && k.find("order") == std::string::npos)
      r.status = Status::NumericalFailure, r.error = "non-finite metric " + k;
  return r;
}

std::vector<ScenarioSpec> selected(const ExperimentConfig& cfg, const RunOptions& opt) {
  std::vector<ScenarioSpec> out;
  for (auto s : cfg.scenarios) {
    if (!opt.only_type.empty() && s.type != opt.only_type) continue;
    if (!opt.param_overrides.is_null()) s.params.merge_patch(opt.param_overrides);
    out.push_back(std::move(s));
  }
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

void validate(const ExperimentConfig& config) {
  for (const auto& s : config.scenarios) (void)prepare(config, s);
}

ScenarioReport run_scenario(const ExperimentConfig& config, const ScenarioSpec& spec) {
  return execute(spec, prepare(config, spec));
}

RunOutcome run(const ExperimentConfig& config, const RunOptions& opt) {
#ifdef _OPENMP
  if (opt.threads > 0) omp_set_num_threads(opt.threads);
#endif
  const auto specs = selected(config, opt);
  std::vector<Step> steps;
  for (const auto& s : specs) steps.push_back(prepare(config, s));

  RunOutcome out;
  ordered_json manifest;
  manifest["lrlab_version"] = version();
  manifest["schema_version"] = kSchemaVersion;
  manifest["config"] = {{"path", opt.config_path},
                        {"name", config.name},
                        {"hash", "fnv1a64:" + hex64(fnv1a64(config.text))},
                        {"seed", config.seed}};
  ordered_json versions;
  versions["lrlab"] = version();
  versions["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION);
  versions["fftw"] = std::string(fftw_version);
  versions["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  manifest["versions"] = versions;
  manifest["threads"] = opt.threads;
  manifest["deterministic"] = opt.deterministic;
  manifest["only_type"] = opt.only_type;
  if (!opt.param_overrides.is_null()) manifest["overrides"] = opt.param_overrides;

  ordered_json tolerances = ordered_json::object();
  ordered_json entries = ordered_json::array();
  bool numerical = false, asserted = false;
  fs::create_directories(opt.out_dir);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    auto r = execute(specs[i], steps[i]);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::string rel = r.name + "/report.json";
    write_text(opt.out_dir / rel, to_json(r).dump(2) + "\n");
    ordered_json tol = ordered_json::object();
    for (const auto& a : r.assertions) tol[a.name] = {{"relation", a.relation}, {"threshold", number_to_json(a.threshold)}};
    tolerances[r.name] = tol;
    entries.push_back({{"name", r.name}, {"type", r.type}, {"status", to_string(r.status)}, {"report", rel}});
    numerical = numerical || r.status == Status::NumericalFailure;
    asserted = asserted || !r.all_passed();
    if (!opt.quiet) {
      std::cout << "[" << r.name << "] " << r.type << ": " << to_string(r.status);
      for (const auto& a : r.assertions)
        if (!a.passed) std::cout << "\n  failed " << a.name << ": " << format_number(a.value) << " " << a.relation << " " << format_number(a.threshold) << " does not hold";
      if (!r.error.empty()) std::cout << "\n  " << r.error;
      char buf[32];
      std::snprintf(buf, sizeof buf, " (%.1f s)", secs);
      std::cout << buf << std::endl;
    }
    out.reports.push_back(std::move(r));
  }
  out.exit_code = numerical ? 4 : asserted ? 3 : 0;
  manifest["tolerances"] = tolerances;
  manifest["scenarios"] = entries;
  manifest["exit_code"] = out.exit_code;
  write_text(opt.out_dir / "manifest.json", manifest.dump(2) + "\n");
  return out;
}

}  // namespace lrlab::app
