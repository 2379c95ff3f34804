#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lrlab/bump.hpp"
#include "lrlab/field.hpp"
#include "lrlab/grid.hpp"

namespace lrlab::app {

inline constexpr int kSchemaVersion = 1;

struct GridSpec {
  int n_spatial = 1;
  double T = 1.0;
  std::array<double, 3> lo{}, hi{};
  int n_t = 2;
  std::array<int, 3> n_x{2, 2, 2};

  SpacetimeGrid build() const;
};

/// Named closed-form field built from bump lists. A covector may instead be declared as a gauge
/// transform `gauge_of + ∇phi` of another covector.
struct FieldSpec {
  enum class Kind { Scalar, Covector } kind = Kind::Scalar;
  std::vector<BumpSpec> bumps;                    ///< scalar
  std::vector<std::vector<BumpSpec>> components;  ///< covector
  std::string gauge_of, phi;
};

struct ScenarioSpec {
  std::string type;
  std::string name;
  std::string path;  ///< location in the config, for error messages
  nlohmann::json params;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  std::string name;
  std::uint64_t seed = 0;
  std::optional<GridSpec> grid;
  std::map<std::string, FieldSpec> fields;
  std::vector<ScenarioSpec> scenarios;
  std::string text;  ///< raw file contents
};

const std::vector<std::string>& scenario_types();

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Reads typed values out of a JSON object, naming the offending field path on failure.
class Params {
 public:
  Params(const nlohmann::json& j, std::string path);

  bool has(const std::string& key) const;
  double number(const std::string& key, std::optional<double> def = std::nullopt) const;
  int integer(const std::string& key, std::optional<int> def = std::nullopt) const;
  bool boolean(const std::string& key, std::optional<bool> def = std::nullopt) const;
  std::string string(const std::string& key, std::optional<std::string> def = std::nullopt) const;
  std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> def = std::nullopt) const;
  /// Unit vector (|v| = 1 to 1e-9).
  std::vector<double> unit_vector(const std::string& key, int n) const;
  Params child(const std::string& key) const;
  const nlohmann::json& raw() const { return j_; }
  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  [[noreturn]] void invalid(const std::string& key, const std::string& what) const;

 private:
  const nlohmann::json* find(const std::string& key) const;
  nlohmann::json j_;
  std::string path_;
};

GridSpec parse_grid(const Params& p);
std::vector<BumpSpec> parse_bumps(const nlohmann::json& j, const std::string& path);

/// Samples named fields on a grid (closed forms are kept, so derivatives stay exact).
class FieldLibrary {
 public:
  explicit FieldLibrary(const ExperimentConfig& config) : config_(&config) {}
  bool contains(const std::string& name) const { return config_->fields.count(name) > 0; }
  AnalyticField scalar_closed_form(const std::string& name, int dim, const std::string& where) const;
  std::vector<AnalyticField> covector_closed_form(const std::string& name, int dim, const std::string& where) const;
  ScalarField scalar(const std::string& name, const SpacetimeGrid& g, const std::string& where) const;
  CovectorField covector(const std::string& name, const SpacetimeGrid& g, const std::string& where) const;

 private:
  const ExperimentConfig* config_;
};

}  // namespace lrlab::app
