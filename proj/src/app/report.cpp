#include "lrlab/app/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lrlab/error.hpp"

namespace lrlab::app {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Status s) {
  switch (s) {
    case Status::Passed: return "passed";
    case Status::AssertionFailed: return "assertion-failed";
    case Status::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

Status status_from_string(const std::string& s) {
  if (s == "passed") return Status::Passed;
  if (s == "assertion-failed") return Status::AssertionFailed;
  if (s == "numerical-failure") return Status::NumericalFailure;
  fail(ErrorCode::MissingReport, "unknown report status \"" + s + "\"");
}

void ScenarioReport::metric(const std::string& key, double value) {
  for (auto& [k, v] : metrics)
    if (k == key) {
      v = value;
      return;
    }
  metrics.emplace_back(key, value);
}

bool ScenarioReport::check(const std::string& n, double value, const std::string& relation, double threshold) {
  bool ok = std::isfinite(value);
  if (relation == "<=")
    ok = ok && value <= threshold;
  else if (relation == ">=")
    ok = ok && value >= threshold;
  else if (relation == "==")
    ok = ok && value == threshold;
  else
    fail(ErrorCode::InvalidArgument, "unknown relation " + relation);
  assertions.push_back({n, value, threshold, relation, ok});
  if (!ok && status == Status::Passed) status = Status::AssertionFailed;
  return ok;
}

Table& ScenarioReport::table(const std::string& n, std::vector<std::string> columns) {
  tables.push_back({n, std::move(columns), {}});
  return tables.back();
}

bool ScenarioReport::all_passed() const {
  for (const auto& a : assertions)
    if (!a.passed) return false;
  return status == Status::Passed;
}

ordered_json number_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
  }
  fail(ErrorCode::MissingReport, "malformed number in report: " + j.dump());
}

ordered_json to_json(const ScenarioReport& r) {
  ordered_json j;
  j["scenario"] = r.name;
  j["type"] = r.type;
  j["status"] = to_string(r.status);
  if (!r.error.empty()) j["error"] = r.error;
  ordered_json m = ordered_json::object();
  for (const auto& [k, v] : r.metrics) m[k] = number_to_json(v);
  j["metrics"] = m;
  ordered_json a = ordered_json::array();
  for (const auto& x : r.assertions)
    a.push_back({{"name", x.name},
                 {"value", number_to_json(x.value)},
                 {"relation", x.relation},
                 {"threshold", number_to_json(x.threshold)},
                 {"passed", x.passed}});
  j["assertions"] = a;
  ordered_json t = ordered_json::array();
  for (const auto& tab : r.tables) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : tab.rows) {
      ordered_json jr = ordered_json::array();
      for (double v : row) jr.push_back(number_to_json(v));
      rows.push_back(jr);
    }
    t.push_back({{"name", tab.name}, {"columns", tab.columns}, {"rows", rows}});
  }
  j["tables"] = t;
  return j;
}

ScenarioReport report_from_json(const json& j) {
  try {
    ScenarioReport r;
    r.name = j.at("scenario").get<std::string>();
    r.type = j.at("type").get<std::string>();
    r.status = status_from_string(j.at("status").get<std::string>());
    if (j.contains("error")) r.error = j.at("error").get<std::string>();
    for (auto it = j.at("metrics").begin(); it != j.at("metrics").end(); ++it)
      r.metrics.emplace_back(it.key(), number_from_json(it.value()));
    for (const auto& a : j.at("assertions"))
      r.assertions.push_back({a.at("name").get<std::string>(), number_from_json(a.at("value")),
                              number_from_json(a.at("threshold")), a.at("relation").get<std::string>(),
                              a.at("passed").get<bool>()});
    for (const auto& t : j.at("tables")) {
      Table tab{t.at("name").get<std::string>(), t.at("columns").get<std::vector<std::string>>(), {}};
      for (const auto& row : t.at("rows")) {
        std::vector<double> v;
        for (const auto& x : row) v.push_back(number_from_json(x));
        tab.rows.push_back(std::move(v));
      }
      r.tables.push_back(std::move(tab));
    }
    return r;
  } catch (const json::exception& e) {
    fail(ErrorCode::MissingReport, std::string("malformed report: ") + e.what());
  }
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  require(static_cast<bool>(out), ErrorCode::IoError, "cannot write " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::MissingReport, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ReportDirectory ReportDirectory::load(const fs::path& dir) {
  const fs::path mpath = dir / "manifest.json";
  require(fs::exists(mpath), ErrorCode::MissingReport, "no manifest.json in " + dir.string());
  ReportDirectory d;
  try {
    d.manifest = ordered_json::parse(read_text(mpath));
  } catch (const json::exception& e) {
    fail(ErrorCode::MissingReport, "malformed manifest: " + std::string(e.what()));
  }
  for (const auto& s : d.manifest.value("scenarios", ordered_json::array())) {
    const fs::path rp = dir / s.at("report").get<std::string>();
    require(fs::exists(rp), ErrorCode::MissingReport, "report listed in the manifest is missing: " + rp.string());
    try {
      d.reports.push_back(report_from_json(json::parse(read_text(rp))));
    } catch (const json::parse_error& e) {
      fail(ErrorCode::MissingReport, "malformed report " + rp.string() + ": " + e.what());
    }
  }
  return d;
}

ExportFormat export_format_from_string(const std::string& s) {
  if (s == "csv") return ExportFormat::Csv;
  if (s == "json") return ExportFormat::Json;
  fail(ErrorCode::ConfigInvalid, "format: expected csv or json, got \"" + s + "\"");
}

namespace {

std::string csv_row(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line + "\n";
}

}  // namespace

std::vector<fs::path> export_reports(const fs::path& dir, ExportFormat format) {
  const auto d = ReportDirectory::load(dir);
  const fs::path out = dir / "export";
  fs::remove_all(out);
  fs::create_directories(out);
  std::vector<fs::path> written;
  auto emit = [&](const std::string& file, const std::string& text) {
    write_text(out / file, text);
    written.push_back(out / file);
  };
  emit("manifest.json", d.manifest.dump(2) + "\n");
  if (d.reports.empty()) return written;

  if (format == ExportFormat::Json) {
    for (const auto& r : d.reports) emit(r.name + ".json", to_json(r).dump(2) + "\n");
    return written;
  }

  ordered_json schema;
  schema["format"] = "csv";
  schema["number_format"] = "%.17g; non-finite values as inf, -inf, nan";
  ordered_json files = ordered_json::array();
  auto describe = [&](const std::string& file, const ScenarioReport& r, const std::string& kind,
                      const std::vector<std::string>& cols, const std::vector<std::string>& types) {
    ordered_json c = ordered_json::array();
    for (std::size_t i = 0; i < cols.size(); ++i) c.push_back({{"name", cols[i]}, {"type", types[i]}});
    files.push_back({{"file", file}, {"scenario", r.name}, {"kind", kind}, {"columns", c}});
  };
  for (const auto& r : d.reports) {
    std::string m = csv_row({"metric", "value"});
    for (const auto& [k, v] : r.metrics) m += csv_row({k, format_number(v)});
    emit(r.name + "__metrics.csv", m);
    describe(r.name + "__metrics.csv", r, "metrics", {"metric", "value"}, {"string", "number"});

    std::string a = csv_row({"assertion", "value", "relation", "threshold", "passed"});
    for (const auto& x : r.assertions)
      a += csv_row({x.name, format_number(x.value), x.relation, format_number(x.threshold), x.passed ? "1" : "0"});
    emit(r.name + "__assertions.csv", a);
    describe(r.name + "__assertions.csv", r, "assertions", {"assertion", "value", "relation", "threshold", "passed"},
             {"string", "number", "string", "number", "integer"});

    for (const auto& t : r.tables) {
      std::string s = csv_row(t.columns);
      for (const auto& row : t.rows) {
        std::vector<std::string> cells;
        for (double v : row) cells.push_back(format_number(v));
        s += csv_row(cells);
      }
      const std::string file = r.name + "__" + t.name + ".csv";
      emit(file, s);
      describe(file, r, "table", t.columns, std::vector<std::string>(t.columns.size(), "number"));
    }
  }
  schema["files"] = files;
  emit("schema.json", schema.dump(2) + "\n");
  return written;
}

}  // namespace lrlab::app
