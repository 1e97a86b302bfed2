#include "sparseloc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sparseloc/csv.hpp"

namespace sparseloc {

void ScenarioConfig::validate() const {
  map.validate();
  radio.validate();
  if (!(sample_rate_hz > 0.0)) throw ConfigError("sample_rate_hz must be > 0");
  if (!(v_lin > 0.0) || !(v_ang > 0.0)) throw ConfigError("v_lin and v_ang must be > 0");
  if (!map.bounds.contains(source)) throw ConfigError("source lies outside the map bounds");
  if (!map.bounds.contains(start)) throw ConfigError("start lies outside the map bounds");
  if (!(noise.shadowing_sigma_db >= 0.0)) throw ConfigError("shadowing_sigma_db must be >= 0");
}

void TrajectoryLog::validate_timestamps() const {
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (!(samples[i].t > samples[i - 1].t))
      throw ValidationError("timestamp " + csv::format_double(samples[i].t) + " does not increase", i + 2);
}

TraverseClock::TraverseClock(std::span<const Vec2> waypoints, double v_lin, double v_ang) {
  if (!(v_lin > 0.0) || !(v_ang > 0.0)) throw ConfigError("velocities must be positive");
  if (waypoints.empty()) return;
  initial_ = waypoints.front();
  bool has_heading = false;
  double heading = 0.0;
  double t = 0.0;
  Vec2 at = waypoints.front();
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    const Vec2 d = waypoints[i] - at;
    const double len = norm(d);
    if (len == 0.0) continue;
    const double h = std::atan2(d.y, d.x);
    if (!has_heading) {
      initial_heading_ = h;  // starts aligned with the first segment
      heading = h;
      has_heading = true;
    }
    const double turn = normalize_angle(h - heading);
    if (turn != 0.0) {
      const double dt = std::abs(turn) / v_ang;
      phases_.push_back({t, t + dt, at, at, heading, heading + turn, true});
      t += dt;
    }
    const double dt = len / v_lin;
    phases_.push_back({t, t + dt, at, waypoints[i], h, h, false});
    t += dt;
    heading = h;
    at = waypoints[i];
  }
  duration_ = t;
}

RobotState TraverseClock::state_at(double t) const {
  RobotState s{initial_, initial_heading_, t};
  if (phases_.empty()) return s;
  if (t <= 0.0) return s;
  // Linear scan from a binary-searched phase.
  auto it = std::upper_bound(phases_.begin(), phases_.end(), t, [](double v, const Phase& p) { return v < p.t1; });
  if (it == phases_.end()) {
    const Phase& last = phases_.back();
    s.position = last.to;
    s.heading = normalize_angle(last.heading_to);
    return s;
  }
  const Phase& p = *it;
  const double span = p.t1 - p.t0;
  const double f = span > 0.0 ? std::clamp((t - p.t0) / span, 0.0, 1.0) : 1.0;
  if (p.rotating) {
    s.position = p.from;
    s.heading = normalize_angle(p.heading_from + f * (p.heading_to - p.heading_from));
  } else {
    s.position = p.from + f * (p.to - p.from);
    s.heading = normalize_angle(p.heading_from);
  }
  return s;
}

TrajectoryLog simulate_traverse(const CoveragePath& path, const ScenarioConfig& scenario, std::uint64_t first_draw) {
  TrajectoryLog log;
  log.scenario_id = scenario.id;
  if (path.waypoints.empty()) return log;
  if (!(scenario.sample_rate_hz > 0.0)) throw ConfigError("sample_rate_hz must be > 0");
  const TraverseClock clock(path.waypoints, scenario.v_lin, scenario.v_ang);
  const double period = 1.0 / scenario.sample_rate_hz;
  const auto n = static_cast<std::size_t>(std::floor(clock.duration() * scenario.sample_rate_hz + 1e-9)) + 1;
  NoiseStream stream(scenario.noise.seed, first_draw);
  log.samples.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * period;
    const RobotState st = clock.state_at(t);
    const auto m = sample_rssi(scenario.source, st.position, scenario.radio, scenario.noise, stream);
    log.samples.push_back({t, st.position.x, st.position.y, m.rssi_dbm});
  }
  return log;
}

void write_log(const TrajectoryLog& log, std::ostream& out) {
  csv::write_row(out, {"t", "x", "y", "rssi"});
  for (const auto& s : log.samples)
    csv::write_row(out, {csv::format_double(s.t), csv::format_double(s.x), csv::format_double(s.y),
                         csv::format_double(s.rssi)});
}

void write_log(const TrajectoryLog& log, const std::string& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + file + " for writing");
  write_log(log, out);
}

TrajectoryLog read_log(std::istream& in, Diagnostics* diag) {
  TrajectoryLog log;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header t,x,y,rssi", 1);
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
  if (csv::split_row(line) != std::vector<std::string>{"t", "x", "y", "rssi"})
    throw ParseError("expected header t,x,y,rssi", 1);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = csv::split_row(line);
    if (f.size() != 4) throw ParseError("expected 4 columns, got " + std::to_string(f.size()), lineno);
    Sample s;
    double* dst[4] = {&s.t, &s.x, &s.y, &s.rssi};
    for (int c = 0; c < 4; ++c) {
      const auto v = csv::parse_double(f[static_cast<std::size_t>(c)]);
      if (!v || !std::isfinite(*v)) throw ParseError("malformed value '" + f[static_cast<std::size_t>(c)] + "'", lineno);
      *dst[c] = *v;
    }
    if (!log.samples.empty() && !(s.t > log.samples.back().t))
      throw ValidationError("timestamp " + f[0] + " does not increase", lineno);
    log.samples.push_back(s);
  }
  if (log.samples.empty() && diag) diag->warn("log contains a header but no samples");
  return log;
}

TrajectoryLog replay_log(const std::string& csv_path, Diagnostics* diag) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + csv_path);
  TrajectoryLog log = read_log(in, diag);
  log.scenario_id = csv_path;
  return log;
}

std::vector<SweepRow> ground_truth_sweep(const ScenarioConfig& scenario, const SweepConfig& config) {
  scenario.radio.validate();
  if (!(config.step > 0.0)) throw ConfigError("sweep step must be > 0");
  if (!(config.d_max >= config.step)) throw ConfigError("sweep d_max must be >= step");
  if (config.repetitions < 1) throw ConfigError("sweep repetitions must be >= 1");
  const auto points = static_cast<std::size_t>(std::floor(config.d_max / config.step + 1e-9));
  std::vector<double> distances;
  for (std::size_t i = 1; i <= points; ++i) distances.push_back(static_cast<double>(i) * config.step);

  std::vector<SweepRow> rows;
  NoiseStream stream(scenario.noise.seed);
  for (double power : config.power_levels_dbm) {
    RadioLinkParams radio = scenario.radio;
    radio.tx_power_dbm = power;
    for (SweepPass pass : {SweepPass::away, SweepPass::toward}) {
      for (std::size_t i = 0; i < distances.size(); ++i) {
        const double d = pass == SweepPass::away ? distances[i] : distances[distances.size() - 1 - i];
        SweepRow row{power, pass, d, 0.0, {}};
        double sum = 0.0;
        for (int r = 0; r < config.repetitions; ++r) {
          const auto m = sample_rssi({0.0, 0.0}, {d, 0.0}, radio, scenario.noise, stream);
          row.readings.push_back(m.rssi_dbm);
          sum += m.rssi_dbm;
        }
        row.mean_rssi = sum / config.repetitions;
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

}  // namespace sparseloc
