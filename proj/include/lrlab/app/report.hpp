#pragma once

#include <deque>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace lrlab::app {

using ordered_json = nlohmann::ordered_json;

struct Assertion {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string relation;  ///< "<=", ">=" or "=="
  bool passed = false;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

enum class Status { Passed, AssertionFailed, NumericalFailure };
std::string to_string(Status s);
Status status_from_string(const std::string& s);

struct ScenarioReport {
  std::string name;
  std::string type;
  Status status = Status::Passed;
  std::string error;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<Assertion> assertions;
  std::deque<Table> tables;  ///< references returned by table() stay valid

  void metric(const std::string& key, double value);
  /// Records value ≤ threshold (or ≥ for relation ">="); non-finite values fail.
  bool check(const std::string& name, double value, const std::string& relation, double threshold);
  Table& table(const std::string& name, std::vector<std::string> columns);
  bool all_passed() const;
};

/// Non-finite numbers are written as the strings "inf", "-inf" and "nan".
ordered_json number_to_json(double v);
double number_from_json(const nlohmann::json& j);

ordered_json to_json(const ScenarioReport& r);
ScenarioReport report_from_json(const nlohmann::json& j);

std::string format_number(double v);
std::uint64_t fnv1a64(const std::string& bytes);

/// Reads `<dir>/manifest.json` and every report it lists; throws MissingReport otherwise.
struct ReportDirectory {
  nlohmann::ordered_json manifest;
  std::vector<ScenarioReport> reports;
  static ReportDirectory load(const std::filesystem::path& dir);
};

enum class ExportFormat { Csv, Json };
ExportFormat export_format_from_string(const std::string& s);

/// Writes `<dir>/export/`: a copy of the manifest plus, per report, CSV files with a schema file
/// (csv) or a canonical JSON document (json). Returns the written paths in order.
std::vector<std::filesystem::path> export_reports(const std::filesystem::path& dir, ExportFormat format);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace lrlab::app
