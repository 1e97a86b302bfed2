#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace sparseloc;
using namespace sparseloc::cli;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

ScenarioConfig scenario_or_default(const std::string& config) {
  if (config.empty()) return {};
  return load_experiment(config).scenario;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radio source localization from sparse coverage paths"};
  app.require_subcommand(1);

  std::string config, out, log_csv;

  auto* plan = app.add_subcommand("plan", "Plan one coverage path per time budget");
  plan->add_option("config", config, "Experiment JSON")->required()->check(CLI::ExistingFile);
  plan->add_option("-o,--out", out, "Output directory (default: config output_dir)");

  auto* run = app.add_subcommand("run", "Simulate, estimate and summarize an experiment");
  run->add_option("config", config, "Experiment JSON")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--out", out, "Output directory (default: config output_dir)");

  auto* replay = app.add_subcommand("replay", "Run the estimators on a recorded t,x,y,rssi log");
  replay->add_option("config", config, "Experiment JSON (scenario bounds, source, estimators)")
      ->required()
      ->check(CLI::ExistingFile);
  replay->add_option("log", log_csv, "Log CSV")->required()->check(CLI::ExistingFile);
  replay->add_option("-o,--out", out, "Output directory")->required();

  CurveRange range;
  double exponent = 2.0;
  auto* curves = app.add_subcommand("curves", "Received power and Fresnel clearance tables");
  curves->add_option("-c,--config", config, "Take radio parameters from this experiment");
  curves->add_option("--from", range.from, "First distance, m")->capture_default_str();
  curves->add_option("--to", range.to, "Last distance, m")->capture_default_str();
  curves->add_option("--step", range.step, "Distance step, m")->capture_default_str();
  auto* exp_opt = curves->add_option("--exponent", exponent, "Path-loss exponent (default 2, or the config's)");
  curves->add_option("-o,--out", out, "Output directory")->required();

  SweepConfig sweep_cfg;
  std::uint64_t seed = 0;
  auto* sweep = app.add_subcommand("sweep", "Stationary distance sweep at several transmit powers");
  sweep->add_option("-c,--config", config, "Take radio and noise parameters from this experiment");
  sweep->add_option("--d-max", sweep_cfg.d_max, "Farthest distance, m")->capture_default_str();
  sweep->add_option("--step", sweep_cfg.step, "Distance step, m")->capture_default_str();
  sweep->add_option("--repetitions", sweep_cfg.repetitions, "Readings per distance and pass")->capture_default_str();
  sweep->add_option("--powers", sweep_cfg.power_levels_dbm, "Transmit powers, dBm");
  sweep->add_option("--seed", seed, "Noise seed")->capture_default_str();
  sweep->add_option("-o,--out", out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (plan->parsed() || run->parsed()) {
      ExperimentSpec spec = load_experiment(config);
      const fs::path dir = out.empty() ? fs::path(spec.output_dir) : fs::path(out);
      if (plan->parsed()) {
        for (const auto& m : cmd_plan(spec, dir))
          std::cout << "path_" << m.index << ": budget " << m.time_budget << " s, cell " << m.cell_size << " m, "
                    << m.path.visited_blocks.size() << "/" << m.block_count << " blocks, "
                    << m.path.estimated_duration << " s\n";
        return kOk;
      }
      RunReport r = cmd_run(spec, dir, std::cerr);
      std::cout << "wrote " << dir.string() << " (" << spec.seeds.size() << " seeds, " << r.maps.size()
                << " maps, " << r.failures.size() << " failures)\n";
      return kOk;
    }
    if (replay->parsed()) {
      cmd_replay(load_experiment(config), log_csv, out, std::cerr);
      std::cout << "wrote " << out << '\n';
      return kOk;
    }
    if (curves->parsed()) {
      RadioLinkParams radio = scenario_or_default(config).radio;
      if (config.empty() || exp_opt->count() > 0) radio.path_loss_exponent = exponent;
      cmd_curves(radio, range, out);
      return kOk;
    }
    if (sweep->parsed()) {
      ScenarioConfig sc = scenario_or_default(config);
      cmd_sweep(sc, sweep_cfg, seed, out);
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}
