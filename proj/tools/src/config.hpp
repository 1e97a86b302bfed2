#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparseloc/active_sensing.hpp"
#include "sparseloc/simulator.hpp"

namespace sparseloc::cli {

enum class Method { tile, peak, biharmonic, cubic, active_sensing };

struct EstimatorSpec {
  Method method = Method::tile;
  double tile_edge = 1.0;       // tile
  double spacing = 0.25;        // biharmonic, cubic
  int n_particles = 1000;       // active_sensing
  double time_budget_s = 0.0;   // active_sensing; 0 = first planner budget
  double roughening_sigma_m = 0.2;

  std::string label() const;
};

struct PlannerSpec {
  /// Fixed cell size. When absent each budget picks the finest candidate that
  /// covers the whole map in time.
  std::optional<double> cell_size;
  std::vector<double> cell_size_candidates{1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0};
  int max_edge = 4;
  std::vector<double> time_budgets;
};

struct ConvergenceSpec {
  double step = 1.0;
  /// Labels of estimators that get a convergence series. Empty = every tile estimator.
  std::vector<std::string> methods;
};

struct ExperimentSpec {
  ScenarioConfig scenario;
  PlannerSpec planner;
  std::vector<EstimatorSpec> estimators;
  std::vector<std::uint64_t> seeds;
  ConvergenceSpec convergence;
  std::string output_dir = "results";
  bool export_fields = false;

  /// Throws ConfigError.
  void validate() const;
  bool wants_convergence(const EstimatorSpec& e) const;
};

/// Parses an experiment document. Unknown keys and wrong types raise ConfigError
/// naming the offending path (e.g. `scenario.radio.frequency_hz`).
ExperimentSpec parse_experiment(const nlohmann::json& doc);
ExperimentSpec load_experiment(const std::string& file);

/// Fully resolved document; parse_experiment(to_json(spec)) reproduces `spec`.
nlohmann::json to_json(const ExperimentSpec& spec);
nlohmann::json to_json(const ScenarioConfig& scenario);

}  // namespace sparseloc::cli
