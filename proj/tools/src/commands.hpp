#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"
#include "sparseloc/coverage_planner.hpp"
#include "sparseloc/metrics.hpp"

namespace sparseloc::cli {

namespace fs = std::filesystem;

struct PlannedMap {
  std::size_t index = 0;
  double time_budget = 0.0;
  double cell_size = 0.0;
  std::size_t block_count = 0;
  bool full_coverage = false;
  CoveragePath path;
};

/// One coverage path per planner budget.
std::vector<PlannedMap> plan_maps(const ExperimentSpec& spec);

struct StageFailure {
  std::uint64_t seed = 0;
  std::string map;  // "map_<k>" or "active_sensing"
  std::string method;
  std::string message;
};

struct RunReport {
  std::vector<PlannedMap> maps;
  std::vector<StageFailure> failures;
  /// errors[label][map index] -> one entry per successful seed; active sensing uses map index 0.
  std::map<std::string, std::vector<std::vector<double>>> errors;
  std::map<std::string, std::vector<std::vector<double>>> converged_at;
};

/// Writes path_<k>.csv and plan_<k>.json into `out_dir`.
std::vector<PlannedMap> cmd_plan(const ExperimentSpec& spec, const fs::path& out_dir);

/// Full experiment: planning, simulation per seed and map, every estimator,
/// convergence series and the aggregate summary. Failures are recorded per seed.
RunReport cmd_run(const ExperimentSpec& spec, const fs::path& out_dir, std::ostream& log);

/// Runs the log-based estimators of `spec` on a recorded log. Errors are measured
/// against the scenario source.
void cmd_replay(const ExperimentSpec& spec, const fs::path& log_csv, const fs::path& out_dir, std::ostream& log);

struct CurveRange {
  double from = 0.1;
  double to = 26.0;
  double step = 0.1;
};

/// friis.csv (d, p_r) and fresnel.csv (d, fz1, fz2, fz3).
void cmd_curves(const RadioLinkParams& radio, const CurveRange& range, const fs::path& out_dir);

/// Stationary ground-truth sweep table.
void cmd_sweep(const ScenarioConfig& scenario, const SweepConfig& config, std::uint64_t seed, const fs::path& out_csv);

/// Distances from..to inclusive (within half a step), at least one point.
std::vector<double> curve_points(const CurveRange& range);

nlohmann::json to_json(const ErrorSummary& s);

}  // namespace sparseloc::cli
