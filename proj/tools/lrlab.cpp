#include <CLI11.hpp>

#include <iostream>

#include "lrlab/app/config.hpp"
#include "lrlab/app/report.hpp"
#include "lrlab/app/runner.hpp"
#include "lrlab/error.hpp"

namespace app = lrlab::app;

namespace {

struct Common {
  std::string config;
  std::string out = "lrlab-out";
  int threads = 0;
  bool deterministic = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "Experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "Artifact directory");
  sub->add_option("--threads", c.threads, "OpenMP threads (0 keeps the default)")->check(CLI::NonNegativeNumber);
  sub->add_flag("--deterministic", c.deterministic, "Record deterministic mode in the manifest");
}

int run_with(const Common& c, const std::string& only_type, nlohmann::json overrides = nullptr) {
  auto cfg = app::load_config(c.config);
  app::RunOptions opt;
  opt.out_dir = c.out;
  opt.config_path = c.config;
  opt.threads = c.threads;
  opt.deterministic = c.deterministic;
  opt.only_type = only_type;
  opt.param_overrides = std::move(overrides);
  if (!only_type.empty()) {
    bool any = false;
    for (const auto& s : cfg.scenarios) any = any || s.type == only_type;
    if (!any && only_type == "carleman-sweep") {
      cfg.scenarios.push_back({"carleman-sweep", "carleman-sweep", "scenarios[default]", nlohmann::json::object()});
      any = true;
    }
    if (!any) lrlab::fail(lrlab::ErrorCode::ConfigInvalid, "scenarios: no scenario of type \"" + only_type + "\"");
  }
  const auto outcome = app::run(cfg, opt);
  std::cout << "manifest: " << (opt.out_dir / "manifest.json").string() << "\n";
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Light-ray transform and boundary-rigidity laboratory"};
  cli.set_version_flag("--version", app::version());
  cli.require_subcommand(1);

  Common common;
  std::function<int()> action;

  auto* run = cli.add_subcommand("run", "Run every scenario in the config");
  add_common(run, common);
  run->callback([&] { action = [&] { return run_with(common, ""); }; });

  auto* validate = cli.add_subcommand("validate", "Parse and validate a config without running it");
  validate->add_option("--config", common.config, "Experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
  validate->callback([&] {
    action = [&] {
      const auto cfg = app::load_config(common.config);
      app::validate(cfg);
      std::cout << "config ok: " << cfg.scenarios.size() << " scenario(s)\n";
      return 0;
    };
  });

  for (const auto& type : app::scenario_types()) {
    if (type == "carleman-sweep") continue;
    auto* sub = cli.add_subcommand(type, "Run only the " + type + " scenarios of the config");
    add_common(sub, common);
    sub->callback([&, type] { action = [&, type] { return run_with(common, type); }; });
  }

  auto* carleman = cli.add_subcommand("carleman", "Carleman estimate h-sweeps");
  carleman->require_subcommand(1);
  auto* boundary = carleman->add_subcommand("boundary-sweep", "Boundary estimate sides over h");
  add_common(boundary, common);
  boundary->callback([&] {
    action = [&] {
      const int code = run_with(common, "carleman-sweep", {{"mode", "boundary"}});
      app::export_reports(common.out, app::ExportFormat::Csv);
      return code;
    };
  });
  int sob = 0;
  auto* interior = carleman->add_subcommand("interior-sweep", "Interior estimate ratios over h");
  add_common(interior, common);
  interior->add_option("--s", sob, "Sobolev index")->check(CLI::IsMember({0, -1}));
  interior->callback([&] {
    action = [&] {
      const int code = run_with(common, "carleman-sweep", {{"mode", "interior"}, {"s", sob}});
      app::export_reports(common.out, app::ExportFormat::Csv);
      return code;
    };
  });

  std::string report_dir, format = "csv";
  auto* exp = cli.add_subcommand("export", "Re-serialize the reports of a prior run");
  exp->add_option("report_dir", report_dir, "Artifact directory of a prior run");
  exp->add_option("--out", report_dir, "Artifact directory of a prior run");
  exp->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  exp->callback([&] {
    action = [&] {
      if (report_dir.empty()) lrlab::fail(lrlab::ErrorCode::MissingReport, "no report directory given");
      for (const auto& p : app::export_reports(report_dir, app::export_format_from_string(format)))
        std::cout << p.string() << "\n";
      return 0;
    };
  });

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return action ? action() : 2;
  } catch (const lrlab::Error& e) {
    std::cerr << "lrlab: " << e.what() << "\n";
    return app::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "lrlab: " << e.what() << "\n";
    return 4;
  }
}
