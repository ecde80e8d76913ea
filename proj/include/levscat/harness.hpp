#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "levscat/potential.hpp"
#include "levscat/ssf.hpp"
#include "levscat/threshold.hpp"

namespace levscat::harness {

using json = nlohmann::json;

enum class Task { Channels, Phases, Threshold, GreensCheck, Levinson, Sweep };

std::string_view to_string(Task t) noexcept;
Task task_from_string(const std::string& s);

/// Coupling placed relative to the critical value of one channel: g = factor·g*.
struct CriticalCoupling {
  int channel = 0;  // index in the ascending channel list
  double lo = 0.0;
  double hi = 0.0;
  double factor = 1.0;
};

struct Scenario {
  std::string name;
  PotentialSpec spec;
  std::optional<CriticalCoupling> g_critical;
  Task task = Task::Levinson;
  json params = json::object();
  json tolerances = json::object();
};

/// Throws Error{ScenarioError} naming the offending field.
Scenario scenario_from_json(const json& doc);
json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::string& path);

/// SHA-256 (hex) of the canonical JSON form.
std::string scenario_hash(const Scenario& s);
std::string sha256_hex(const std::string& data);

/// Structural, positivity and grid diagnostics; empty when the scenario is usable.
std::vector<std::string> validate(const Scenario& s);

struct RunOptions {
  std::string out_dir = "results";
  int threads = 1;
  double tol_scale = 1.0;
};

struct Artifact {
  std::string name;
  std::string content;
};

struct TaskResult {
  std::vector<Artifact> files;
  json summary = json::object();
  bool over_budget = false;
};

/// g for the scenario: the fixed value, or factor·g* from critical_coupling.
double resolve_coupling(const Scenario& s);
/// Solver options from the scenario parameters, tolerance overrides and tol-scale.
SSFOptions ssf_options(const Scenario& s, const RunOptions& run);

/// Runs the task in memory. Module errors are rethrown as ScenarioError with context.
TaskResult execute(const Scenario& s, const RunOptions& run);

struct RunRecord {
  std::string directory;
  std::string scenario_hash;
  std::string version;
  std::string started;
  std::string finished;
  bool over_budget = false;
  json manifest = json::array();
  json summary = json::object();

  json to_json() const;
};

/// execute() plus persistence: results/<name>/<run-id>/ and an append to <out>/ledger.jsonl.
RunRecord run(const Scenario& s, const RunOptions& options);

json to_json(const LevinsonReport& r);
json to_json(const ThresholdReport& r);

struct SweepPoint {
  double factor = 1.0;
  double g = 0.0;
  LevinsonReport report;
};

struct SweepResult {
  double g_star = 0.0;
  std::size_t center = 0;
  std::vector<SweepPoint> points;
  double left_limit = 0.0;     // lhs - β extrapolated linearly from the two points below g*
  double at_center = 0.0;      // lhs - β at g*
  double jump = 0.0;           // left_limit - at_center
  double expected_jump = 0.0;  // J₀ = N₀ + Σ ς m from the report at g*
  double tolerance = 2e-2;
};

/// 41-point (default) sweep over factor ∈ [0.8, 1.2] around the resolved coupling;
/// the centre point is the resolved coupling itself.
SweepResult sweep(const Scenario& s, const RunOptions& run);

std::string version();

}  // namespace levscat::harness
