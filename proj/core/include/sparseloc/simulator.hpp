#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "sparseloc/coverage_planner.hpp"
#include "sparseloc/errors.hpp"
#include "sparseloc/propagation.hpp"

namespace sparseloc {

struct ScenarioConfig {
  std::string id = "scenario";
  FieldMap map;
  Vec2 source;
  RadioLinkParams radio;
  NoiseModel noise;
  double v_lin = 0.8;
  double v_ang = 0.75;
  double sample_rate_hz = 1.0;
  Vec2 start;

  void validate() const;
};

struct Sample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double rssi = 0.0;

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const Sample&, const Sample&) = default;
};

struct TrajectoryLog {
  std::string scenario_id;
  std::vector<Sample> samples;

  /// Throws ValidationError (line = 1-based sample index + 1 for the header) when
  /// timestamps are not strictly increasing.
  void validate_timestamps() const;
};

struct RobotState {
  Vec2 position;
  double heading = 0.0;  // (-pi, pi]
  double t = 0.0;
};

/// Rotate-then-drive playback of a waypoint polyline on a simulated clock.
class TraverseClock {
 public:
  TraverseClock(std::span<const Vec2> waypoints, double v_lin, double v_ang);

  double duration() const { return duration_; }
  /// Pose at simulated time `t` (clamped to [0, duration]).
  RobotState state_at(double t) const;

 private:
  struct Phase {
    double t0, t1;
    Vec2 from, to;
    double heading_from, heading_to;
    bool rotating;
  };
  std::vector<Phase> phases_;
  Vec2 initial_{};
  double initial_heading_ = 0.0;
  double duration_ = 0.0;
};

/// Drives the path and samples RSSI every 1/sample_rate seconds, t = 0 included.
/// Noise draws come from NoiseStream(scenario.noise.seed, first_draw).
TrajectoryLog simulate_traverse(const CoveragePath& path, const ScenarioConfig& scenario,
                                std::uint64_t first_draw = 0);

/// Log CSV with header `t,x,y,rssi`; values printed in shortest round-trip form.
void write_log(const TrajectoryLog& log, std::ostream& out);
void write_log(const TrajectoryLog& log, const std::string& file);

/// Parses a log CSV. Malformed rows raise ParseError and out-of-order timestamps
/// raise ValidationError, both with the offending line number.
TrajectoryLog read_log(std::istream& in, Diagnostics* diag = nullptr);
TrajectoryLog replay_log(const std::string& csv_path, Diagnostics* diag = nullptr);

enum class SweepPass { away, toward };

struct SweepRow {
  double tx_power_dbm = 0.0;
  SweepPass pass = SweepPass::away;
  double distance_m = 0.0;
  double mean_rssi = 0.0;
  std::vector<double> readings;  // one per repetition
};

struct SweepConfig {
  double d_max = 26.0;
  double step = 1.0;
  int repetitions = 1;
  std::vector<double> power_levels_dbm{0.0, 5.0, 10.0, 15.0, 19.78};
};

/// Stationary measurements at step, 2*step, ..., d_max for each power level, first
/// moving away from the transmitter and then back toward it.
std::vector<SweepRow> ground_truth_sweep(const ScenarioConfig& scenario, const SweepConfig& config);

}  // namespace sparseloc
