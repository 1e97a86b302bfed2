#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>

#include "sparseloc/active_sensing.hpp"
#include "sparseloc/csv.hpp"
#include "sparseloc/estimators.hpp"
#include "sparseloc/interpolation.hpp"

#ifndef SPARSELOC_VERSION
#define SPARSELOC_VERSION "0.0.0"
#endif

namespace sparseloc::cli {

using nlohmann::json;

namespace {

constexpr std::uint64_t kActiveSensingSeedSalt = 0x9e3779b97f4a7c15ULL;

std::ofstream open_out(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  return out;
}

void write_json(const fs::path& file, const json& doc) {
  auto out = open_out(file);
  out << doc.dump(2) << '\n';
}

void print_warnings(std::ostream& log, const std::string& where, const Diagnostics& diag) {
  std::set<std::string> seen;
  for (const auto& w : diag.warnings)
    if (seen.insert(w).second) log << where << "warning: " << w << '\n';
}

std::string map_name(std::size_t k) { return "map_" + std::to_string(k); }

json estimate_json(const Estimate& e) {
  json j = {{"method", e.method}, {"x", e.position.x}, {"y", e.position.y}, {"score", e.score}};
  if (e.error) j["error"] = *e.error;
  return j;
}

void write_series(const fs::path& file, const ConvergenceSeries& s) {
  auto out = open_out(file);
  csv::write_row(out, {"t", "error"});
  for (const auto& p : s.points) csv::write_row(out, {csv::format_double(p.t), csv::format_double(p.error)});
}

PrefixEstimator prefix_estimator(const EstimatorSpec& e, Rect bounds) {
  switch (e.method) {
    case Method::tile:
      return [edge = e.tile_edge, bounds](std::span<const Sample> s) {
        return estimate_tile_argmax(assign_tiles(s, edge, bounds));
      };
    case Method::peak:
      return [](std::span<const Sample> s) { return estimate_peak_rssi(s); };
    case Method::biharmonic:
      return [spec = FieldSpec::over_bounds(bounds, e.spacing)](std::span<const Sample> s) {
        return estimate_field_argmax(interpolate_biharmonic(s, spec), "biharmonic");
      };
    case Method::cubic:
      return [spec = FieldSpec::over_bounds(bounds, e.spacing)](std::span<const Sample> s) {
        return estimate_field_argmax(interpolate_cubic(s, spec), "cubic");
      };
    case Method::active_sensing: break;
  }
  throw DomainError("active sensing is not a log estimator");
}

struct LogOutcome {
  std::map<std::string, Estimate> estimates;
  std::map<std::string, double> converged_at;
  std::vector<std::pair<std::string, std::string>> failures;  // label, message
};

// Runs every log-based estimator on `samples` and writes the per-log artifacts to `dir`.
LogOutcome estimate_log(const ExperimentSpec& spec, std::span<const Sample> samples, const fs::path& dir,
                        Diagnostics& diag) {
  LogOutcome out;
  const Rect bounds = spec.scenario.map.bounds;
  const Vec2 truth = spec.scenario.source;
  for (const auto& e : spec.estimators) {
    if (e.method == Method::active_sensing) continue;
    const std::string label = e.label();
    try {
      Estimate est;
      switch (e.method) {
        case Method::tile: {
          TileGrid grid = assign_tiles(samples, e.tile_edge, bounds);
          est = estimate_tile_argmax(grid);
          auto f = open_out(dir / ("tiles_" + label + ".csv"));
          grid.write_csv(f);
          break;
        }
        case Method::peak: est = estimate_peak_rssi(samples); break;
        case Method::biharmonic:
        case Method::cubic: {
          const FieldSpec grid = FieldSpec::over_bounds(bounds, e.spacing);
          InterpolatedField field = e.method == Method::cubic ? interpolate_cubic(samples, grid, &diag)
                                                              : interpolate_biharmonic(samples, grid, &diag);
          est = estimate_field_argmax(field, label);
          if (spec.export_fields) {
            auto f = open_out(dir / ("field_" + label + ".csv"));
            field.write_csv(f);
          }
          break;
        }
        case Method::active_sensing: break;
      }
      est.error = distance_error(est.position, truth);
      out.estimates[label] = est;
      if (spec.wants_convergence(e)) {
        ConvergenceSeries s =
            convergence_series(samples, prefix_estimator(e, bounds), truth, spec.convergence.step, label);
        write_series(dir / ("convergence_" + label + ".csv"), s);
        out.converged_at[label] = s.converged_at;
      }
    } catch (const EstimationError& ex) {
      out.failures.emplace_back(label, ex.what());
    } catch (const DomainError& ex) {
      out.failures.emplace_back(label, ex.what());
    }
  }

  json doc = {{"estimates", json::array()}, {"converged_at", json::object()}, {"failures", json::array()}};
  for (const auto& e : spec.estimators) {
    const std::string label = e.label();
    if (auto it = out.estimates.find(label); it != out.estimates.end()) doc["estimates"].push_back(estimate_json(it->second));
  }
  for (const auto& [label, t] : out.converged_at) doc["converged_at"][label] = t;
  for (const auto& [label, msg] : out.failures) doc["failures"].push_back({{"method", label}, {"message", msg}});
  write_json(dir / "estimates.json", doc);
  return out;
}

json map_json(const PlannedMap& m, int max_edge) {
  return {{"index", m.index},
          {"time_budget", m.time_budget},
          {"cell_size", m.cell_size},
          {"max_edge", max_edge},
          {"blocks_visited", m.path.visited_blocks.size()},
          {"blocks_total", m.block_count},
          {"full_coverage", m.full_coverage},
          {"waypoints", m.path.waypoints.size()},
          {"estimated_duration", m.path.estimated_duration}};
}

const EstimatorSpec* find_active_sensing(const ExperimentSpec& spec) {
  for (const auto& e : spec.estimators)
    if (e.method == Method::active_sensing) return &e;
  return nullptr;
}

json summary_block(const std::vector<std::vector<double>>& per_map, const std::vector<PlannedMap>& maps,
                   bool single) {
  json j = json::object();
  std::vector<double> pooled;
  json by_map = json::object();
  for (std::size_t k = 0; k < per_map.size(); ++k) {
    pooled.insert(pooled.end(), per_map[k].begin(), per_map[k].end());
    if (!single && !per_map[k].empty()) by_map[map_name(maps[k].index)] = to_json(summarize(per_map[k]));
  }
  j["pooled"] = pooled.empty() ? json(nullptr) : to_json(summarize(pooled));
  if (!single) j["maps"] = by_map;
  return j;
}

}  // namespace

json to_json(const ErrorSummary& s) {
  return {{"n", s.n},   {"mean", s.mean}, {"median", s.median}, {"q1", s.q1},
          {"q3", s.q3}, {"min", s.min},   {"max", s.max},       {"outliers", s.outliers}};
}

std::vector<PlannedMap> plan_maps(const ExperimentSpec& spec) {
  const ScenarioConfig& sc = spec.scenario;
  std::vector<PlannedMap> maps;
  for (std::size_t k = 0; k < spec.planner.time_budgets.size(); ++k) {
    PlannedMap m;
    m.index = k;
    m.time_budget = spec.planner.time_budgets[k];
    m.cell_size = spec.planner.cell_size
                      ? *spec.planner.cell_size
                      : select_cell_size(sc.map, spec.planner.cell_size_candidates, spec.planner.max_edge,
                                         m.time_budget, sc.v_lin, sc.v_ang, sc.start);
    FieldMap map = sc.map;
    map.cell_size = m.cell_size;
    m.path = plan_coverage(map, {m.cell_size, spec.planner.max_edge, m.time_budget}, sc.v_lin, sc.v_ang, sc.start);
    m.block_count = build_blocks(rasterize(map), spec.planner.max_edge).size();
    const double full = full_coverage_duration(map, m.cell_size, spec.planner.max_edge, sc.v_lin, sc.v_ang, sc.start);
    m.full_coverage = full <= m.time_budget;
    maps.push_back(std::move(m));
  }
  return maps;
}

std::vector<PlannedMap> cmd_plan(const ExperimentSpec& spec, const fs::path& out_dir) {
  auto maps = plan_maps(spec);
  for (const auto& m : maps) {
    fs::create_directories(out_dir);
    write_path_csv(m.path, (out_dir / ("path_" + std::to_string(m.index) + ".csv")).string());
    write_json(out_dir / ("plan_" + std::to_string(m.index) + ".json"), map_json(m, spec.planner.max_edge));
  }
  return maps;
}

RunReport cmd_run(const ExperimentSpec& spec, const fs::path& out_dir, std::ostream& log) {
  RunReport report;
  report.maps = plan_maps(spec);
  const auto& maps = report.maps;

  json manifest = {{"tool", "sparseloc"}, {"version", SPARSELOC_VERSION}, {"config", to_json(spec)}};
  manifest["maps"] = json::array();
  for (const auto& m : maps) {
    manifest["maps"].push_back(map_json(m, spec.planner.max_edge));
    fs::create_directories(out_dir / "maps");
    write_path_csv(m.path, (out_dir / "maps" / (map_name(m.index) + ".csv")).string());
  }
  write_json(out_dir / "manifest.json", manifest);

  for (const auto& e : spec.estimators) {
    const std::size_t slots = e.method == Method::active_sensing ? 1 : maps.size();
    report.errors[e.label()].assign(slots, {});
    if (spec.wants_convergence(e)) report.converged_at[e.label()].assign(slots, {});
  }

  const EstimatorSpec* as = find_active_sensing(spec);
  for (std::uint64_t seed : spec.seeds) {
    const fs::path seed_dir = out_dir / "seeds" / std::to_string(seed);
    for (const auto& m : maps) {
      const std::string name = map_name(m.index);
      try {
        ScenarioConfig sc = spec.scenario;
        sc.noise.seed = seed;
        sc.map.cell_size = m.cell_size;
        TrajectoryLog tl = simulate_traverse(m.path, sc, static_cast<std::uint64_t>(m.index) << 40);
        tl.scenario_id = sc.id;
        fs::create_directories(seed_dir / name);
        write_log(tl, (seed_dir / name / "log.csv").string());
        Diagnostics diag;
        LogOutcome o = estimate_log(spec, tl.samples, seed_dir / name, diag);
        print_warnings(log, "seed " + std::to_string(seed) + " " + name + ": ", diag);
        for (const auto& [label, est] : o.estimates) report.errors[label][m.index].push_back(*est.error);
        for (const auto& [label, t] : o.converged_at) report.converged_at[label][m.index].push_back(t);
        for (const auto& [label, msg] : o.failures) {
          report.failures.push_back({seed, name, label, msg});
          log << "seed " << seed << " " << name << ": " << label << " failed: " << msg << '\n';
        }
      } catch (const std::exception& ex) {
        report.failures.push_back({seed, name, "simulation", ex.what()});
        log << "seed " << seed << " " << name << ": simulation failed: " << ex.what() << '\n';
      }
    }

    if (as) {
      try {
        ScenarioConfig sc = spec.scenario;
        sc.noise.seed = seed ^ kActiveSensingSeedSalt;
        ActiveSensingConfig cfg;
        cfg.n_particles = as->n_particles;
        cfg.time_budget_s = as->time_budget_s > 0.0 ? as->time_budget_s : spec.planner.time_budgets.front();
        cfg.roughening_sigma_m = as->roughening_sigma_m;
        cfg.seed = seed;
        Diagnostics diag;
        ActiveSensingResult r = active_sensing_run(sc, cfg, &diag);
        print_warnings(log, "seed " + std::to_string(seed) + " active_sensing: ", diag);
        const fs::path dir = seed_dir / "active_sensing";
        fs::create_directories(dir);
        write_log(r.log, (dir / "log.csv").string());
        write_series(dir / "convergence_active_sensing.csv", r.convergence);
        Estimate est = r.estimate;
        est.error = distance_error(est.position, spec.scenario.source);
        write_json(dir / "estimates.json",
                   {{"estimates", json::array({estimate_json(est)})},
                    {"converged_at", {{"active_sensing", r.convergence.converged_at}}},
                    {"resample_count", r.resample_count},
                    {"reinit_count", r.reinit_count},
                    {"failures", json::array()}});
        report.errors["active_sensing"][0].push_back(*est.error);
        report.converged_at["active_sensing"][0].push_back(r.convergence.converged_at);
      } catch (const std::exception& ex) {
        report.failures.push_back({seed, "active_sensing", "active_sensing", ex.what()});
        log << "seed " << seed << " active_sensing failed: " << ex.what() << '\n';
      }
    }
  }

  json summary = {{"errors", json::object()}, {"converged_at", json::object()}, {"failures", json::array()}};
  for (const auto& e : spec.estimators) {
    const std::string label = e.label();
    const bool single = e.method == Method::active_sensing;
    summary["errors"][label] = summary_block(report.errors[label], maps, single);
    if (auto it = report.converged_at.find(label); it != report.converged_at.end())
      summary["converged_at"][label] = summary_block(it->second, maps, single);
  }
  for (const auto& f : report.failures)
    summary["failures"].push_back({{"seed", f.seed}, {"map", f.map}, {"method", f.method}, {"message", f.message}});
  write_json(out_dir / "summary.json", summary);

  auto sweep = open_out(out_dir / "tile_sweep.csv");
  csv::write_row(sweep, {"map", "cell_size", "tile_edge", "n", "mean", "median", "q1", "q3", "min", "max"});
  auto row = [&](const std::string& map, const std::string& cell, double edge, const std::vector<double>& v) {
    if (v.empty()) return;
    ErrorSummary s = summarize(v);
    csv::write_row(sweep, {map, cell, csv::format_double(edge), std::to_string(s.n), csv::format_double(s.mean),
                           csv::format_double(s.median), csv::format_double(s.q1), csv::format_double(s.q3),
                           csv::format_double(s.min), csv::format_double(s.max)});
  };
  for (const auto& e : spec.estimators) {
    if (e.method != Method::tile) continue;
    const auto& per_map = report.errors[e.label()];
    std::vector<double> pooled;
    for (const auto& m : maps) {
      row(map_name(m.index), csv::format_double(m.cell_size), e.tile_edge, per_map[m.index]);
      pooled.insert(pooled.end(), per_map[m.index].begin(), per_map[m.index].end());
    }
    row("all", "", e.tile_edge, pooled);
  }
  return report;
}

void cmd_replay(const ExperimentSpec& spec, const fs::path& log_csv, const fs::path& out_dir, std::ostream& log) {
  Diagnostics diag;
  TrajectoryLog tl = replay_log(log_csv.string(), &diag);
  for (const auto& s : tl.samples)
    if (!spec.scenario.map.bounds.contains(s.position()))
      throw ValidationError("sample at t=" + csv::format_double(s.t) + " lies outside the map bounds");
  if (find_active_sensing(spec)) log << "active_sensing needs a live robot; skipped in replay\n";
  if (tl.samples.empty()) {
    print_warnings(log, "", diag);
    throw EstimationError("log has no samples");
  }
  LogOutcome o = estimate_log(spec, tl.samples, out_dir, diag);
  print_warnings(log, "", diag);
  for (const auto& [label, msg] : o.failures) log << label << " failed: " << msg << '\n';
  if (o.estimates.empty()) throw EstimationError("every estimator failed on " + log_csv.string());
}

std::vector<double> curve_points(const CurveRange& r) {
  if (!(r.step > 0.0) || !std::isfinite(r.from) || !std::isfinite(r.to) || !(r.from > 0.0) || r.to < r.from)
    throw ConfigError("curve range needs 0 < from <= to and step > 0");
  const auto n = static_cast<std::size_t>(std::floor((r.to - r.from) / r.step + 1e-9)) + 1;
  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) d[k] = r.from + static_cast<double>(k) * r.step;
  return d;
}

void cmd_curves(const RadioLinkParams& radio, const CurveRange& range, const fs::path& out_dir) {
  radio.validate();
  const auto d = curve_points(range);
  auto friis = open_out(out_dir / "friis.csv");
  csv::write_row(friis, {"d", "p_r"});
  for (double x : d) csv::write_row(friis, {csv::format_double(x), csv::format_double(received_power(x, radio))});

  auto fresnel = open_out(out_dir / "fresnel.csv");
  csv::write_row(fresnel, {"d", "fz1", "fz2", "fz3"});
  for (double x : d)
    csv::write_row(fresnel, {csv::format_double(x), csv::format_double(obstruction_free_pct(1, x, radio)),
                             csv::format_double(obstruction_free_pct(2, x, radio)),
                             csv::format_double(obstruction_free_pct(3, x, radio))});
}

void cmd_sweep(const ScenarioConfig& scenario, const SweepConfig& config, std::uint64_t seed, const fs::path& out_csv) {
  ScenarioConfig sc = scenario;
  sc.noise.seed = seed;
  const auto rows = ground_truth_sweep(sc, config);
  auto out = open_out(out_csv);
  std::vector<std::string> header{"tx_power_dbm", "pass", "distance_m", "mean_rssi"};
  for (int r = 1; r <= config.repetitions; ++r) header.push_back("reading_" + std::to_string(r));
  csv::write_row(out, header);
  for (const auto& row : rows) {
    std::vector<std::string> f{csv::format_double(row.tx_power_dbm), row.pass == SweepPass::away ? "away" : "toward",
                               csv::format_double(row.distance_m), csv::format_double(row.mean_rssi)};
    for (double v : row.readings) f.push_back(csv::format_double(v));
    csv::write_row(out, f);
  }
}

}  // namespace sparseloc::cli
