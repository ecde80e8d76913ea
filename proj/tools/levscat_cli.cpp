#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "levscat/error.hpp"
#include "levscat/harness.hpp"

namespace fs = std::filesystem;
namespace hs = levscat::harness;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kOverBudget = 2;

int do_validate(const std::string& path) {
  const auto s = hs::load_scenario(path);
  const auto diag = hs::validate(s);
  for (const auto& d : diag) std::cout << "diagnostic: " << d << "\n";
  if (diag.empty()) std::cout << s.name << ": valid (hash " << hs::scenario_hash(s) << ")\n";
  return diag.empty() ? kOk : kError;
}

int do_run(hs::Scenario s, const hs::RunOptions& opts) {
  const auto diag = hs::validate(s);
  if (!diag.empty()) {
    for (const auto& d : diag) std::cerr << "diagnostic: " << d << "\n";
    return kError;
  }
  const auto rec = hs::run(s, opts);
  std::cout << rec.directory << "\n" << rec.summary.dump(2) << "\n";
  if (rec.over_budget) std::cerr << "residual over budget\n";
  return rec.over_budget ? kOverBudget : kOk;
}

int do_report(const std::string& target) {
  fs::path path(target);
  if (fs::is_directory(path)) {
    for (const char* name : {"report.json", "jump.json", "threshold.json", "phases.json", "record.json"})
      if (fs::exists(path / name)) {
        path /= name;
        break;
      }
  }
  std::ifstream in(path);
  if (!in) throw levscat::Error(levscat::ErrorKind::ScenarioError, "no report at '" + target + "'");
  const auto doc = hs::json::parse(in);
  std::cout << doc.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Levinson identities for critical-decay potentials"};
  app.set_version_flag("--version", hs::version());
  app.require_subcommand(1);

  std::string scenario_path, report_path;
  hs::RunOptions opts;
  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", scenario_path, "scenario file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", opts.out_dir, "results directory");
    cmd->add_option("--threads", opts.threads, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--tol-scale", opts.tol_scale, "uniform tolerance scale")->check(CLI::PositiveNumber);
  };

  auto* validate = app.add_subcommand("validate", "check a scenario without running numerics");
  validate->add_option("--scenario", scenario_path, "scenario file")->required()->check(CLI::ExistingFile);
  auto* run = app.add_subcommand("run", "run the scenario task");
  add_run_flags(run);
  auto* sweep = app.add_subcommand("sweep", "run the scenario as a coupling sweep");
  add_run_flags(sweep);
  auto* report = app.add_subcommand("report", "pretty-print a stored report");
  report->add_option("path", report_path, "run directory or report file")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (validate->parsed()) return do_validate(scenario_path);
    if (report->parsed()) return do_report(report_path);
    auto s = hs::load_scenario(scenario_path);
    if (sweep->parsed()) s.task = hs::Task::Sweep;
    return do_run(s, opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
}
