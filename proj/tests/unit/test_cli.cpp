#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lrlab/app/config.hpp"
#include "lrlab/app/report.hpp"
#include "lrlab/app/runner.hpp"
#include "lrlab/error.hpp"

using namespace lrlab;
using namespace lrlab::app;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(LRLAB_SOURCE_DIR) / "configs";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lrlab-test-" + name);
  fs::remove_all(p);
  return p;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

const char* kTiny = R"({
  "schema_version": 1,
  "name": "tiny",
  "grid": {"n_spatial": 1, "T": 1.5, "lo": [-0.5], "hi": [0.5], "n_t": 49, "n_x": 17},
  "fields": {
    "A": {"type": "covector", "components": [
      [{"center": [0.75, 0.0], "radii": [0.4, 0.2], "amplitude": 0.3}], []]},
    "Phi": {"type": "scalar", "bumps": [{"center": [0.75, 0.0], "radii": [0.4, 0.2], "amplitude": 0.1}]}
  },
  "scenarios": [
    {"type": "forward", "name": "fwd", "A": "A", "probe": {"omega": [1.0]}}
  ]
})";

}  // namespace

TEST_CASE("config validation names the offending field") {
  CHECK(code_of([] { parse_config("{not json"); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { parse_config(R"({"schema_version": 2})"); }) == ErrorCode::ConfigInvalid);

  std::string bad = kTiny;
  bad.replace(bad.find("\"omega\": [1.0]"), 14, "\"omega\": [0.9]");
  const auto cfg = parse_config(bad);
  const auto msg = message_of([&] { validate(cfg); });
  CHECK(msg.find("ConfigInvalid") != std::string::npos);
  CHECK(msg.find("scenarios[0].probe.omega") != std::string::npos);

  std::string unknown = kTiny;
  unknown.replace(unknown.find("\"A\": \"A\""), 8, "\"A\": \"B\"");
  CHECK(message_of([&] { validate(parse_config(unknown)); }).find("scenarios[0].A") != std::string::npos);

  std::string type = kTiny;
  type.replace(type.find("\"forward\""), 9, "\"backward\"");
  CHECK(message_of([&] { parse_config(type); }).find("scenarios[0].type") != std::string::npos);

  std::string margin = kTiny;
  margin.replace(margin.find("\"radii\": [0.4, 0.2], \"amplitude\": 0.3"), 37, "\"radii\": [0.4, 0.45], \"amplitude\": 0.3");
  CHECK(message_of([&] { validate(parse_config(margin)); }).find("fields.A.components[0]") != std::string::npos);

  std::string gauge = kTiny;
  gauge.replace(gauge.find("\"Phi\":"), 6, "\"A2\": {\"type\": \"covector\", \"gauge_of\": \"A\", \"phi\": \"Nope\"}, \"Phi\":");
  CHECK(message_of([&] { parse_config(gauge); }).find("fields.A2.phi") != std::string::npos);
}

TEST_CASE("empty scenario list writes only a manifest") {
  const auto dir = scratch("empty");
  RunOptions opt;
  opt.out_dir = dir;
  opt.quiet = true;
  const auto out = run(load_config(kConfigs / "empty.json"), opt);
  CHECK(out.exit_code == 0);
  CHECK(out.reports.empty());
  std::vector<fs::path> entries;
  for (const auto& e : fs::directory_iterator(dir)) entries.push_back(e.path().filename());
  CHECK(entries == std::vector<fs::path>{"manifest.json"});
  const auto files = export_reports(dir, ExportFormat::Csv);
  REQUIRE(files.size() == 1);
  CHECK(files[0].filename() == "manifest.json");
}

TEST_CASE("bundled gauge-smoke scenario passes and is reproducible") {
  const auto cfg = load_config(kConfigs / "gauge-smoke.json");
  RunOptions a, b;
  a.out_dir = scratch("smoke-a");
  b.out_dir = scratch("smoke-b");
  a.quiet = b.quiet = true;
  b.threads = 2;
  const auto ra = run(cfg, a);
  const auto rb = run(cfg, b);
  CHECK(ra.exit_code == 0);
  CHECK(rb.exit_code == 0);
  for (const auto& r : ra.reports) {
    const auto ta = read_text(a.out_dir / r.name / "report.json");
    const auto tb = read_text(b.out_dir / r.name / "report.json");
    CHECK(ta == tb);
  }
  const auto manifest = nlohmann::json::parse(read_text(a.out_dir / "manifest.json"));
  CHECK(manifest.at("config").at("hash").get<std::string>().rfind("fnv1a64:", 0) == 0);
  CHECK(manifest.at("tolerances").contains("gauge-smoke"));
}

TEST_CASE("failed assertions give exit code 3") {
  std::string strict = kTiny;
  strict.replace(strict.find("\"probe\""), 7, "\"tolerances\": {\"max_abs_u\": 1e-6}, \"probe\"");
  RunOptions opt;
  opt.out_dir = scratch("strict");
  opt.quiet = true;
  const auto out = run(parse_config(strict), opt);
  CHECK(out.exit_code == 3);
  REQUIRE(out.reports.size() == 1);
  CHECK(out.reports[0].status == Status::AssertionFailed);
  CHECK(exit_code_for(ErrorCode::ConfigInvalid) == 2);
  CHECK(exit_code_for(ErrorCode::NonfiniteState) == 4);
}

TEST_CASE("export round-trips json to csv") {
  const auto dir = scratch("export");
  RunOptions opt;
  opt.out_dir = dir;
  opt.quiet = true;
  const auto cfg = parse_config(R"({"schema_version": 1, "name": "c", "scenarios": [
    {"type": "carleman-sweep", "name": "sweep", "mode": "interior", "n_x": 25, "hs": [0.2, 0.1, 0.05]}]})");
  REQUIRE(run(cfg, opt).exit_code == 0);
  export_reports(dir, ExportFormat::Csv);

  const auto report = report_from_json(nlohmann::json::parse(read_text(dir / "sweep" / "report.json")));
  const auto& tab = report.tables.at(1);
  const auto rows = read_csv(dir / "export" / ("sweep__" + tab.name + ".csv"));
  REQUIRE(rows.size() == tab.rows.size() + 1);
  CHECK(rows[0].front() == "h");
  CHECK(rows[0].back() == "ratio");
  CHECK(rows.size() == 4);
  for (std::size_t i = 0; i < tab.rows.size(); ++i)
    for (std::size_t j = 0; j < tab.rows[i].size(); ++j) {
      const double v = std::strtod(rows[i + 1][j].c_str(), nullptr);
      const double ref = tab.rows[i][j];
      CHECK(std::abs(v - ref) <= 1e-15 * std::abs(ref));
    }

  const auto schema = nlohmann::json::parse(read_text(dir / "export" / "schema.json"));
  bool listed = false;
  for (const auto& f : schema.at("files"))
    if (f.at("file") == "sweep__" + tab.name + ".csv") {
      listed = true;
      CHECK(f.at("columns").size() == tab.columns.size());
    }
  CHECK(listed);

  const auto first = read_text(dir / "export" / "sweep__metrics.csv");
  export_reports(dir, ExportFormat::Csv);
  CHECK(read_text(dir / "export" / "sweep__metrics.csv") == first);

  export_reports(dir, ExportFormat::Json);
  const auto again = report_from_json(nlohmann::json::parse(read_text(dir / "export" / "sweep.json")));
  CHECK(to_json(again).dump() == to_json(report).dump());
}

TEST_CASE("missing reports are detected") {
  CHECK(code_of([] { export_reports(scratch("nothing"), ExportFormat::Csv); }) == ErrorCode::MissingReport);
  const auto dir = scratch("missing");
  RunOptions opt;
  opt.out_dir = dir;
  opt.quiet = true;
  run(parse_config(kTiny), opt);
  fs::remove(dir / "fwd" / "report.json");
  CHECK(code_of([&] { export_reports(dir, ExportFormat::Json); }) == ErrorCode::MissingReport);
}

TEST_CASE("number formatting keeps non-finite values") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(std::isnan(number_from_json(number_to_json(std::nan("")))));
  CHECK(number_from_json(number_to_json(-INFINITY)) == -INFINITY);
  CHECK(fnv1a64("") == 14695981039346656037ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}
