#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#if __has_include(<sys/wait.h>)
#include <sys/wait.h>
#endif

#include "commands.hpp"
#include "config.hpp"
#include "sparseloc/errors.hpp"
#include "sparseloc/propagation.hpp"

using namespace sparseloc;
using namespace sparseloc::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json small_doc() {
  return json::parse(R"({
    "scenario": {
      "id": "small",
      "bounds": { "min": [0, 0], "max": [8, 8] },
      "source": [5.5, 3.0],
      "start": [0.5, 0.5]
    },
    "planner": { "time_budgets": [60, 150], "cell_size": 1.0 },
    "estimators": [
      { "method": "tile", "tile_edge": 1 },
      { "method": "tile", "tile_edge": 2 },
      "peak", "biharmonic", "cubic",
      { "method": "active_sensing", "n_particles": 200, "time_budget_s": 40 }
    ],
    "seeds": [1, 2]
  })");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sparseloc_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + SPARSELOC_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
#ifdef WEXITSTATUS
  return WEXITSTATUS(status);
#else
  return status;
#endif
}

std::string message_of(const json& doc) {
  try {
    parse_experiment(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config errors name the offending key") {
    json d = small_doc();
    d["scenario"]["radio"] = {{"frequency", 2.4e9}};
    CHECK(message_of(d).find("scenario.radio.frequency") != std::string::npos);

    d = small_doc();
    d["scenario"].erase("source");
    CHECK(message_of(d).find("scenario.source") != std::string::npos);

    d = small_doc();
    d["estimators"][0]["tile_edge"] = "one";
    CHECK(message_of(d).find("estimators[0].tile_edge") != std::string::npos);

    d = small_doc();
    d["estimators"][1] = "kriging";
    CHECK(message_of(d).find("kriging") != std::string::npos);

    d = small_doc();
    d["planner"]["max_edge"] = 3;
    CHECK(message_of(d).find("power of two") != std::string::npos);

    d = small_doc();
    d["seeds"] = json::array();
    CHECK_FALSE(message_of(d).empty());
  }

  TEST_CASE("resolved config round-trips") {
    const auto spec = parse_experiment(small_doc());
    const json once = to_json(spec);
    CHECK(to_json(parse_experiment(once)) == once);
    CHECK(spec.estimators[2].label() == "peak_rssi");
    CHECK(spec.estimators[5].n_particles == 200);
  }

  TEST_CASE("court config loads") {
    const auto spec = load_experiment(SPARSELOC_SOURCE_DIR "/configs/court.json");
    CHECK(spec.seeds.size() == 20);
    CHECK(spec.planner.time_budgets == std::vector<double>{700, 1550});
    CHECK_THROWS_AS(load_experiment("no/such/config.json"), ConfigError);
  }

  TEST_CASE("run is byte-for-byte reproducible") {
    const auto spec = parse_experiment(small_doc());
    std::stringstream log;
    const auto a = scratch("run_a");
    const auto b = scratch("run_b");
    const auto report = cmd_run(spec, a, log);
    cmd_run(spec, b, log);
    CHECK(report.failures.empty());
    CHECK(report.maps.size() == 2);
    for (const char* f : {"summary.json", "tile_sweep.csv", "seeds/1/map_0/log.csv", "seeds/2/map_1/estimates.json",
                          "seeds/2/active_sensing/log.csv", "seeds/1/map_1/convergence_tile_1x.csv"}) {
      INFO(f);
      REQUIRE(fs::exists(a / f));
      CHECK(slurp(a / f) == slurp(b / f));
    }
    const json summary = json::parse(slurp(a / "summary.json"));
    CHECK(summary.contains("errors"));
    fs::remove_all(a);
    fs::remove_all(b);
  }

  TEST_CASE("replay reproduces the run estimates") {
    const auto spec = parse_experiment(small_doc());
    std::stringstream log;
    const auto run_dir = scratch("replay_run");
    const auto out = scratch("replay_out");
    cmd_run(spec, run_dir, log);
    cmd_replay(spec, run_dir / "seeds/1/map_0/log.csv", out, log);
    const json replayed = json::parse(slurp(out / "estimates.json"));
    const json original = json::parse(slurp(run_dir / "seeds/1/map_0/estimates.json"));
    CHECK(replayed == original);
    fs::remove_all(run_dir);
    fs::remove_all(out);
  }

  TEST_CASE("curves: single point range and Fresnel clearance") {
    CHECK(curve_points({5.0, 5.0, 0.1}).size() == 1);
    CHECK(curve_points({0.1, 26.0, 0.1}).size() == 260);
    CHECK_THROWS_AS(curve_points({5.0, 1.0, 0.1}), ConfigError);
    const auto out = scratch("curves");
    cmd_curves(RadioLinkParams{}, {0.1, 26.0, 0.1}, out);
    std::ifstream in(out / "fresnel.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "d,fz1,fz2,fz3");
    int rows = 0;
    while (std::getline(in, line)) {
      ++rows;
      const double fz1 = std::stod(line.substr(line.find(',') + 1));
      CHECK(fz1 >= 60.0);
    }
    CHECK(rows == 260);
    fs::remove_all(out);
  }

  TEST_CASE("exit codes") {
    const auto dir = scratch("exit");
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("frobnicate") == 1);
    CHECK(run_cli("run \"" + (dir / "missing.json").string() + "\"") == 1);

    json bad = small_doc();
    bad["scenario"]["colour"] = "red";
    std::ofstream(dir / "bad.json") << bad.dump();
    CHECK(run_cli("plan \"" + (dir / "bad.json").string() + "\" -o \"" + (dir / "p").string() + "\"") == 1);

    json blocked = small_doc();
    blocked["scenario"]["obstacles"] = json::array({json::array({{0, 0}, {8, 0}, {8, 8}, {0, 8}})});
    std::ofstream(dir / "blocked.json") << blocked.dump();
    CHECK(run_cli("plan \"" + (dir / "blocked.json").string() + "\" -o \"" + (dir / "b").string() + "\"") != 0);

    std::ofstream(dir / "shuffled.csv") << "t,x,y,rssi\n0,1,1,-50\n2,1,2,-50\n1,1,3,-50\n";
    std::ofstream(dir / "good.json") << small_doc().dump();
    CHECK(run_cli("replay \"" + (dir / "good.json").string() + "\" \"" + (dir / "shuffled.csv").string() + "\" -o \"" +
                  (dir / "r").string() + "\"") == 2);

    CHECK(run_cli("curves --from 1 --to 2 --step 0.5 -o \"" + (dir / "c").string() + "\"") == 0);
    CHECK(fs::exists(dir / "c" / "friis.csv"));
    CHECK(run_cli("sweep --repetitions 2 --powers 0 -o \"" + (dir / "s.csv").string() + "\"") == 0);
    fs::remove_all(dir);
  }
}
