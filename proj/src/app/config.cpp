#include "lrlab/app/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "lrlab/error.hpp"
#include "lrlab/fields.hpp"

namespace lrlab::app {

using nlohmann::json;

namespace {

[[noreturn]] void invalid_at(const std::string& path, const std::string& what) {
  fail(ErrorCode::ConfigInvalid, path + ": " + what);
}

std::vector<double> as_numbers(const json& j, const std::string& path) {
  if (!j.is_array()) invalid_at(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) invalid_at(path + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

FieldSpec parse_field(const json& j, const std::string& path) {
  if (!j.is_object()) invalid_at(path, "expected an object");
  const Params p(j, path);
  FieldSpec f;
  const std::string type = p.string("type");
  if (type == "scalar") {
    f.kind = FieldSpec::Kind::Scalar;
    f.bumps = j.contains("bumps") ? parse_bumps(j.at("bumps"), path + ".bumps") : std::vector<BumpSpec>{};
  } else if (type == "covector") {
    f.kind = FieldSpec::Kind::Covector;
    if (j.contains("gauge_of")) {
      f.gauge_of = p.string("gauge_of");
      f.phi = p.string("phi");
      if (j.contains("components")) invalid_at(path + ".components", "a gauge-declared covector takes no components");
    } else {
      const json& c = j.contains("components") ? j.at("components") : json();
      if (!c.is_array() || c.empty()) invalid_at(path + ".components", "expected a non-empty array of bump lists");
      for (std::size_t k = 0; k < c.size(); ++k)
        f.components.push_back(parse_bumps(c[k], path + ".components[" + std::to_string(k) + "]"));
    }
  } else {
    invalid_at(path + ".type", "expected \"scalar\" or \"covector\", got \"" + type + "\"");
  }
  return f;
}

}  // namespace

const std::vector<std::string>& scenario_types() {
  static const std::vector<std::string> t{"forward",        "gauge-check", "go-check",      "slice-check",
                                          "curvature-recon", "q-recon",     "full-pipeline", "carleman-sweep"};
  return t;
}

Params::Params(const json& j, std::string path) : j_(j), path_(std::move(path)) {
  if (!j_.is_object()) invalid_at(path_.empty() ? "<root>" : path_, "expected an object");
}

const json* Params::find(const std::string& key) const {
  auto it = j_.find(key);
  return it == j_.end() ? nullptr : &*it;
}

bool Params::has(const std::string& key) const { return find(key) != nullptr; }

void Params::invalid(const std::string& key, const std::string& what) const { invalid_at(where(key), what); }

double Params::number(const std::string& key, std::optional<double> def) const {
  const json* v = find(key);
  if (!v) {
    if (def) return *def;
    invalid(key, "required number is missing");
  }
  if (!v->is_number()) invalid(key, "expected a number");
  const double x = v->get<double>();
  if (!std::isfinite(x)) invalid(key, "must be finite");
  return x;
}

int Params::integer(const std::string& key, std::optional<int> def) const {
  const json* v = find(key);
  if (!v) {
    if (def) return *def;
    invalid(key, "required integer is missing");
  }
  if (!v->is_number_integer()) invalid(key, "expected an integer");
  return v->get<int>();
}

bool Params::boolean(const std::string& key, std::optional<bool> def) const {
  const json* v = find(key);
  if (!v) {
    if (def) return *def;
    invalid(key, "required boolean is missing");
  }
  if (!v->is_boolean()) invalid(key, "expected true or false");
  return v->get<bool>();
}

std::string Params::string(const std::string& key, std::optional<std::string> def) const {
  const json* v = find(key);
  if (!v) {
    if (def) return *def;
    invalid(key, "required string is missing");
  }
  if (!v->is_string()) invalid(key, "expected a string");
  return v->get<std::string>();
}

std::vector<double> Params::numbers(const std::string& key, std::optional<std::vector<double>> def) const {
  const json* v = find(key);
  if (!v) {
    if (def) return *def;
    invalid(key, "required array is missing");
  }
  return as_numbers(*v, where(key));
}

std::vector<double> Params::unit_vector(const std::string& key, int n) const {
  const auto v = numbers(key);
  if (static_cast<int>(v.size()) != n) invalid(key, "expected " + std::to_string(n) + " components");
  double s = 0.0;
  for (double x : v) s += x * x;
  if (std::abs(std::sqrt(s) - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "must be a unit vector (|v| = " << std::sqrt(s) << ")";
    invalid(key, os.str());
  }
  return v;
}

Params Params::child(const std::string& key) const {
  const json* v = find(key);
  return Params(v ? *v : json::object(), where(key));
}

SpacetimeGrid GridSpec::build() const { return SpacetimeGrid(n_spatial, T, lo, hi, n_t, n_x); }

GridSpec parse_grid(const Params& p) {
  GridSpec g;
  g.n_spatial = p.integer("n_spatial");
  if (g.n_spatial < 1 || g.n_spatial > 3) p.invalid("n_spatial", "must be 1, 2 or 3");
  g.T = p.number("T");
  if (!(g.T > 0)) p.invalid("T", "must be positive");
  const auto lo = p.numbers("lo"), hi = p.numbers("hi");
  auto expand = [&](const std::vector<double>& v, const char* key) {
    std::array<double, 3> out{};
    if (v.size() == 1) {
      for (int a = 0; a < g.n_spatial; ++a) out[a] = v[0];
    } else if (static_cast<int>(v.size()) == g.n_spatial) {
      for (int a = 0; a < g.n_spatial; ++a) out[a] = v[a];
    } else {
      p.invalid(key, "expected 1 or n_spatial entries");
    }
    return out;
  };
  g.lo = expand(lo, "lo");
  g.hi = expand(hi, "hi");
  for (int a = 0; a < g.n_spatial; ++a)
    if (!(g.hi[a] > g.lo[a])) p.invalid("hi", "must exceed lo on every axis");
  g.n_t = p.integer("n_t");
  if (g.n_t < 2) p.invalid("n_t", "need at least 2 time samples");
  const json& nx = p.raw().contains("n_x") ? p.raw().at("n_x") : json();
  if (nx.is_number_integer()) {
    for (int a = 0; a < g.n_spatial; ++a) g.n_x[a] = nx.get<int>();
  } else if (nx.is_array() && static_cast<int>(nx.size()) == g.n_spatial) {
    for (int a = 0; a < g.n_spatial; ++a) {
      if (!nx[a].is_number_integer()) p.invalid("n_x", "expected integers");
      g.n_x[a] = nx[a].get<int>();
    }
  } else {
    p.invalid("n_x", "expected an integer or one integer per spatial axis");
  }
  for (int a = 0; a < g.n_spatial; ++a)
    if (g.n_x[a] < 2) p.invalid("n_x", "need at least 2 samples per axis");
  return g;
}

std::vector<BumpSpec> parse_bumps(const json& j, const std::string& path) {
  if (!j.is_array()) invalid_at(path, "expected an array of bumps");
  std::vector<BumpSpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string here = path + "[" + std::to_string(i) + "]";
    const Params p(j[i], here);
    const auto c = p.numbers("center"), r = p.numbers("radii");
    if (c.empty() || c.size() > static_cast<std::size_t>(kMaxDim)) p.invalid("center", "expected 2 to 4 coordinates");
    if (r.size() != c.size()) p.invalid("radii", "must have as many entries as center");
    BumpSpec b;
    for (std::size_t a = 0; a < c.size(); ++a) {
      if (!(r[a] > 0)) p.invalid("radii", "radii must be positive");
      b.center[a] = c[a];
      b.radii[a] = r[a];
    }
    b.amplitude = p.number("amplitude", 1.0);
    try {
      b.kind = bump_kind_from_string(p.string("kind", "smooth"));
    } catch (const Error& e) {
      p.invalid("kind", e.what());
    }
    out.push_back(b);
  }
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ConfigInvalid, std::string("<root>: malformed JSON: ") + e.what());
  }
  const Params root(j, "");
  ExperimentConfig cfg;
  cfg.text = text;
  cfg.schema_version = root.integer("schema_version");
  if (cfg.schema_version != kSchemaVersion)
    root.invalid("schema_version", "unsupported version " + std::to_string(cfg.schema_version) + " (expected " +
                                       std::to_string(kSchemaVersion) + ")");
  cfg.name = root.string("name", "experiment");
  if (root.has("seed")) {
    if (!j.at("seed").is_number_unsigned()) root.invalid("seed", "expected a non-negative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (root.has("grid")) cfg.grid = parse_grid(root.child("grid"));
  if (root.has("fields")) {
    const json& f = j.at("fields");
    if (!f.is_object()) root.invalid("fields", "expected an object of named fields");
    for (auto it = f.begin(); it != f.end(); ++it) cfg.fields[it.key()] = parse_field(it.value(), "fields." + it.key());
    for (const auto& [name, spec] : cfg.fields) {
      if (spec.gauge_of.empty()) continue;
      const std::string where = "fields." + name;
      auto a = cfg.fields.find(spec.gauge_of);
      if (a == cfg.fields.end() || a->second.kind != FieldSpec::Kind::Covector || !a->second.gauge_of.empty())
        invalid_at(where + ".gauge_of", "must name a covector declared by components");
      auto p = cfg.fields.find(spec.phi);
      if (p == cfg.fields.end() || p->second.kind != FieldSpec::Kind::Scalar)
        invalid_at(where + ".phi", "must name a scalar field");
    }
  }
  const json& sc = j.contains("scenarios") ? j.at("scenarios") : json::array();
  if (!sc.is_array()) root.invalid("scenarios", "expected an array");
  std::map<std::string, int> seen;
  for (std::size_t i = 0; i < sc.size(); ++i) {
    const std::string path = "scenarios[" + std::to_string(i) + "]";
    const Params p(sc[i], path);
    ScenarioSpec s;
    s.type = p.string("type");
    bool known = false;
    for (const auto& t : scenario_types()) known = known || t == s.type;
    if (!known) p.invalid("type", "unknown scenario type \"" + s.type + "\"");
    s.name = p.string("name", s.type);
    if (s.name.empty() || s.name.find_first_of("/\\ ") != std::string::npos)
      p.invalid("name", "must be non-empty without spaces or path separators");
    if (seen[s.name]++) p.invalid("name", "duplicate scenario name \"" + s.name + "\"");
    s.path = path;
    s.params = sc[i];
    cfg.scenarios.push_back(std::move(s));
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::ConfigInvalid, "cannot open config file " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

AnalyticField FieldLibrary::scalar_closed_form(const std::string& name, int dim, const std::string& where) const {
  auto it = config_->fields.find(name);
  if (it == config_->fields.end()) invalid_at(where, "unknown field \"" + name + "\"");
  if (it->second.kind != FieldSpec::Kind::Scalar) invalid_at(where, "field \"" + name + "\" is not a scalar");
  if (it->second.bumps.empty()) return AnalyticField::zero(dim);
  return bump_field(dim, it->second.bumps);
}

std::vector<AnalyticField> FieldLibrary::covector_closed_form(const std::string& name, int dim,
                                                              const std::string& where) const {
  auto it = config_->fields.find(name);
  if (it == config_->fields.end()) invalid_at(where, "unknown field \"" + name + "\"");
  const FieldSpec& f = it->second;
  if (f.kind != FieldSpec::Kind::Covector) invalid_at(where, "field \"" + name + "\" is not a covector");
  if (!f.gauge_of.empty()) {
    auto base = covector_closed_form(f.gauge_of, dim, where);
    const auto phi = scalar_closed_form(f.phi, dim, where);
    for (int a = 0; a < dim; ++a) base[a] = base[a] + phi.partial(a);
    return base;
  }
  if (static_cast<int>(f.components.size()) != dim)
    invalid_at("fields." + name + ".components",
               "has " + std::to_string(f.components.size()) + " components, the grid needs " + std::to_string(dim));
  std::vector<AnalyticField> out;
  for (const auto& c : f.components) out.push_back(c.empty() ? AnalyticField::zero(dim) : bump_field(dim, c));
  return out;
}

namespace {

void check_bump_dims(const std::vector<BumpSpec>& bumps, int dim, const std::string& path) {
  for (std::size_t i = 0; i < bumps.size(); ++i)
    for (int a = dim; a < kMaxDim; ++a)
      if (bumps[i].radii[a] != 0.0)
        invalid_at(path + "[" + std::to_string(i) + "]", "has more coordinates than the grid dimension " +
                                                              std::to_string(dim));
}

}  // namespace

ScalarField FieldLibrary::scalar(const std::string& name, const SpacetimeGrid& g, const std::string& where) const {
  const auto f = scalar_closed_form(name, g.dim(), where);
  check_bump_dims(config_->fields.at(name).bumps, g.dim(), "fields." + name + ".bumps");
  try {
    for (const auto& b : config_->fields.at(name).bumps) check_bump_margin(b, g);
  } catch (const Error& e) {
    invalid_at("fields." + name, e.what());
  }
  return sample(g, f);
}

CovectorField FieldLibrary::covector(const std::string& name, const SpacetimeGrid& g, const std::string& where) const {
  const auto comps = covector_closed_form(name, g.dim(), where);
  const FieldSpec& f = config_->fields.at(name);
  const FieldSpec& base = f.gauge_of.empty() ? f : config_->fields.at(f.gauge_of);
  for (std::size_t k = 0; k < base.components.size(); ++k) {
    const std::string path = "fields." + (f.gauge_of.empty() ? name : f.gauge_of) + ".components[" +
                             std::to_string(k) + "]";
    check_bump_dims(base.components[k], g.dim(), path);
    try {
      for (const auto& b : base.components[k]) check_bump_margin(b, g);
    } catch (const Error& e) {
      invalid_at(path, e.what());
    }
  }
  try {
    return CovectorField::from_analytic(g, comps);
  } catch (const Error& e) {
    invalid_at("fields." + name, e.what());
  }
}

}  // namespace lrlab::app
