#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "sparseloc/errors.hpp"
#include "sparseloc/estimators.hpp"
#include "sparseloc/metrics.hpp"
#include "sparseloc/simulator.hpp"

namespace sparseloc {

/// Weighted source hypotheses. Weights are kept normalized to sum 1.
struct ParticleSet {
  std::vector<Vec2> positions;
  std::vector<double> weights;

  std::size_t size() const { return positions.size(); }
  double effective_sample_size() const;
  Vec2 weighted_mean() const;
  /// Returns false (leaving weights untouched) when the total is zero or not finite.
  bool normalize();
};

/// Regular lattice of roughly `n` particles over the free part of the map, with
/// equal weights. The lattice is symmetric, so over an obstacle-free rectangle the
/// weighted mean is exactly its centroid.
ParticleSet uniform_particles(const FieldMap& map, int n);

/// Multiplies each weight by the Gaussian likelihood of `rssi` at `receiver` if the
/// source were at that particle. Returns false when every weight underflows.
bool reweight(ParticleSet& set, Vec2 receiver, double rssi, const RadioLinkParams& radio, double sigma_db);

/// Systematic resampling with offset `u0` in [0, 1). Output weights are uniform.
ParticleSet systematic_resample(const ParticleSet& set, double u0);

struct ActiveSensingConfig {
  int n_particles = 1000;
  double time_budget_s = 600.0;
  std::optional<std::size_t> measurement_budget;
  /// Gaussian jitter applied to particles after each resampling step.
  double roughening_sigma_m = 0.2;
  /// Seed for waypoint selection, resampling and roughening.
  std::uint64_t seed = 0;
};

struct TimedEstimate {
  double t = 0.0;
  Vec2 position;
};

struct ActiveSensingResult {
  TrajectoryLog log;
  std::vector<TimedEstimate> estimates;  // one per measurement
  ConvergenceSeries convergence;         // errors against scenario.source
  Estimate estimate;                     // final weighted mean
  ParticleSet particles;
  std::size_t resample_count = 0;
  std::size_t reinit_count = 0;
};

/// Measure-update-move baseline: the receiver drives to uniformly random free
/// waypoints, sampling at the scenario rate; each sample reweights the particle
/// set and triggers systematic resampling when the effective sample size drops
/// below half the particle count. Stops at the time or measurement budget.
ActiveSensingResult active_sensing_run(const ScenarioConfig& scenario, const ActiveSensingConfig& config,
                                       Diagnostics* diag = nullptr);

}  // namespace sparseloc
