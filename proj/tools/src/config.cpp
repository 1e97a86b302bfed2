#include "config.hpp"

#include <fstream>
#include <set>

#include "sparseloc/estimators.hpp"

namespace sparseloc::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError((path.empty() ? "document" : path) + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items())
    if (!ok.count(k)) throw ConfigError("unknown key " + join(path, k));
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path + " must be a number");
  return v.get<double>();
}

void read(const json& obj, const std::string& path, const char* key, double& out) {
  if (auto it = obj.find(key); it != obj.end()) out = number(*it, join(path, key));
}

void read(const json& obj, const std::string& path, const char* key, int& out) {
  if (auto it = obj.find(key); it != obj.end()) {
    if (!it->is_number_integer()) throw ConfigError(join(path, key) + " must be an integer");
    out = it->get<int>();
  }
}

void read(const json& obj, const std::string& path, const char* key, std::string& out) {
  if (auto it = obj.find(key); it != obj.end()) {
    if (!it->is_string()) throw ConfigError(join(path, key) + " must be a string");
    out = it->get<std::string>();
  }
}

void read(const json& obj, const std::string& path, const char* key, bool& out) {
  if (auto it = obj.find(key); it != obj.end()) {
    if (!it->is_boolean()) throw ConfigError(join(path, key) + " must be true or false");
    out = it->get<bool>();
  }
}

Vec2 point(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) throw ConfigError(path + " must be [x, y]");
  return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
}

const json& required(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("missing key " + join(path, key));
  return *it;
}

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path + " must be a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

RadioLinkParams parse_radio(const json& j, const std::string& path) {
  only_keys(j, path,
            {"frequency_hz", "tx_power_dbm", "tx_extra_gain_db", "sensitivity_offset_db", "path_loss_exponent",
             "antenna_height_m", "near_field_clamp_m"});
  RadioLinkParams r;
  read(j, path, "frequency_hz", r.frequency_hz);
  read(j, path, "tx_power_dbm", r.tx_power_dbm);
  read(j, path, "tx_extra_gain_db", r.tx_extra_gain_db);
  read(j, path, "sensitivity_offset_db", r.sensitivity_offset_db);
  read(j, path, "path_loss_exponent", r.path_loss_exponent);
  read(j, path, "antenna_height_m", r.antenna_height_m);
  read(j, path, "near_field_clamp_m", r.near_field_clamp_m);
  return r;
}

ScenarioConfig parse_scenario(const json& j, const std::string& path) {
  only_keys(j, path, {"id", "bounds", "obstacles", "source", "start", "radio", "noise", "motion"});
  ScenarioConfig s;
  read(j, path, "id", s.id);

  const std::string bpath = join(path, "bounds");
  const json& b = required(j, path, "bounds");
  only_keys(b, bpath, {"min", "max"});
  s.map.bounds = {point(required(b, bpath, "min"), bpath + ".min"), point(required(b, bpath, "max"), bpath + ".max")};

  if (auto it = j.find("obstacles"); it != j.end()) {
    if (!it->is_array()) throw ConfigError(join(path, "obstacles") + " must be a list of polygons");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string ppath = join(path, "obstacles") + "[" + std::to_string(i) + "]";
      const json& poly = (*it)[i];
      if (!poly.is_array()) throw ConfigError(ppath + " must be a list of [x, y] vertices");
      Polygon p;
      for (std::size_t k = 0; k < poly.size(); ++k) p.push_back(point(poly[k], ppath + "[" + std::to_string(k) + "]"));
      s.map.obstacles.push_back(std::move(p));
    }
  }
  s.source = point(required(j, path, "source"), join(path, "source"));
  s.start = point(required(j, path, "start"), join(path, "start"));

  if (auto it = j.find("radio"); it != j.end()) s.radio = parse_radio(*it, join(path, "radio"));
  if (auto it = j.find("noise"); it != j.end()) {
    only_keys(*it, join(path, "noise"), {"shadowing_sigma_db"});
    read(*it, join(path, "noise"), "shadowing_sigma_db", s.noise.shadowing_sigma_db);
  }
  if (auto it = j.find("motion"); it != j.end()) {
    const std::string mpath = join(path, "motion");
    only_keys(*it, mpath, {"v_lin", "v_ang", "sample_rate_hz"});
    read(*it, mpath, "v_lin", s.v_lin);
    read(*it, mpath, "v_ang", s.v_ang);
    read(*it, mpath, "sample_rate_hz", s.sample_rate_hz);
  }
  return s;
}

Method parse_method(const std::string& name, const std::string& path) {
  if (name == "tile") return Method::tile;
  if (name == "peak") return Method::peak;
  if (name == "biharmonic") return Method::biharmonic;
  if (name == "cubic") return Method::cubic;
  if (name == "active_sensing") return Method::active_sensing;
  throw ConfigError(path + ": unknown method '" + name + "' (tile, peak, biharmonic, cubic, active_sensing)");
}

const char* method_name(Method m) {
  switch (m) {
    case Method::tile: return "tile";
    case Method::peak: return "peak";
    case Method::biharmonic: return "biharmonic";
    case Method::cubic: return "cubic";
    case Method::active_sensing: return "active_sensing";
  }
  return "?";
}

EstimatorSpec parse_estimator(const json& j, const std::string& path) {
  if (j.is_string()) return EstimatorSpec{parse_method(j.get<std::string>(), path)};
  only_keys(j, path, {"method", "tile_edge", "spacing", "n_particles", "time_budget_s", "roughening_sigma_m"});
  const json& m = required(j, path, "method");
  if (!m.is_string()) throw ConfigError(join(path, "method") + " must be a string");
  EstimatorSpec e;
  e.method = parse_method(m.get<std::string>(), join(path, "method"));
  read(j, path, "tile_edge", e.tile_edge);
  read(j, path, "spacing", e.spacing);
  read(j, path, "n_particles", e.n_particles);
  read(j, path, "time_budget_s", e.time_budget_s);
  read(j, path, "roughening_sigma_m", e.roughening_sigma_m);
  return e;
}

}  // namespace

std::string EstimatorSpec::label() const {
  switch (method) {
    case Method::tile: return tile_method_label(tile_edge);
    case Method::peak: return "peak_rssi";
    case Method::biharmonic: return "biharmonic";
    case Method::cubic: return "cubic";
    case Method::active_sensing: return "active_sensing";
  }
  return "?";
}

void ExperimentSpec::validate() const {
  scenario.validate();
  if (planner.time_budgets.empty()) throw ConfigError("planner.time_budgets needs at least one budget");
  for (double b : planner.time_budgets)
    if (!(b > 0.0)) throw ConfigError("planner.time_budgets entries must be > 0");
  if (planner.max_edge < 1 || (planner.max_edge & (planner.max_edge - 1)) != 0)
    throw ConfigError("planner.max_edge must be a power of two");
  if (planner.cell_size) {
    if (!(*planner.cell_size > 0.0)) throw ConfigError("planner.cell_size must be > 0");
  } else {
    if (planner.cell_size_candidates.empty()) throw ConfigError("planner.cell_size_candidates is empty");
    for (double c : planner.cell_size_candidates)
      if (!(c > 0.0)) throw ConfigError("planner.cell_size_candidates entries must be > 0");
  }
  if (estimators.empty()) throw ConfigError("at least one estimator is required");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  std::set<std::string> labels;
  for (const auto& e : estimators) {
    if (e.method == Method::tile && !(e.tile_edge > 0.0)) throw ConfigError("tile_edge must be > 0");
    if ((e.method == Method::biharmonic || e.method == Method::cubic) && !(e.spacing > 0.0))
      throw ConfigError("interpolation spacing must be > 0");
    if (e.method == Method::active_sensing) {
      if (e.n_particles < 100) throw ConfigError("active_sensing.n_particles must be >= 100");
      if (!(e.time_budget_s >= 0.0)) throw ConfigError("active_sensing.time_budget_s must be >= 0");
      if (!(e.roughening_sigma_m >= 0.0)) throw ConfigError("active_sensing.roughening_sigma_m must be >= 0");
    }
    if (!labels.insert(e.label()).second) throw ConfigError("estimator " + e.label() + " listed twice");
  }
  if (!(convergence.step > 0.0)) throw ConfigError("convergence.step must be > 0");
  for (const auto& m : convergence.methods)
    if (!labels.count(m)) throw ConfigError("convergence.methods names unknown estimator " + m);
}

bool ExperimentSpec::wants_convergence(const EstimatorSpec& e) const {
  if (e.method == Method::active_sensing) return true;
  if (convergence.methods.empty()) return e.method == Method::tile;
  for (const auto& m : convergence.methods)
    if (m == e.label()) return true;
  return false;
}

ExperimentSpec parse_experiment(const json& doc) {
  only_keys(doc, "", {"scenario", "planner", "estimators", "seeds", "convergence", "output_dir", "export_fields"});
  ExperimentSpec spec;
  spec.scenario = parse_scenario(required(doc, "", "scenario"), "scenario");

  const json& p = required(doc, "", "planner");
  only_keys(p, "planner", {"cell_size", "cell_size_candidates", "max_edge", "time_budgets"});
  if (auto it = p.find("cell_size"); it != p.end()) spec.planner.cell_size = number(*it, "planner.cell_size");
  if (auto it = p.find("cell_size_candidates"); it != p.end())
    spec.planner.cell_size_candidates = number_list(*it, "planner.cell_size_candidates");
  read(p, "planner", "max_edge", spec.planner.max_edge);
  spec.planner.time_budgets = number_list(required(p, "planner", "time_budgets"), "planner.time_budgets");

  const json& es = required(doc, "", "estimators");
  if (!es.is_array()) throw ConfigError("estimators must be a list");
  for (std::size_t i = 0; i < es.size(); ++i)
    spec.estimators.push_back(parse_estimator(es[i], "estimators[" + std::to_string(i) + "]"));

  const json& seeds = required(doc, "", "seeds");
  if (!seeds.is_array()) throw ConfigError("seeds must be a list of non-negative integers");
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (!seeds[i].is_number_unsigned() && !(seeds[i].is_number_integer() && seeds[i].get<long long>() >= 0))
      throw ConfigError("seeds[" + std::to_string(i) + "] must be a non-negative integer");
    spec.seeds.push_back(seeds[i].get<std::uint64_t>());
  }

  if (auto it = doc.find("convergence"); it != doc.end()) {
    only_keys(*it, "convergence", {"step", "methods"});
    read(*it, "convergence", "step", spec.convergence.step);
    if (auto m = it->find("methods"); m != it->end()) {
      if (!m->is_array()) throw ConfigError("convergence.methods must be a list of estimator labels");
      for (const auto& v : *m) {
        if (!v.is_string()) throw ConfigError("convergence.methods must be a list of estimator labels");
        spec.convergence.methods.push_back(v.get<std::string>());
      }
    }
  }
  read(doc, "", "output_dir", spec.output_dir);
  read(doc, "", "export_fields", spec.export_fields);
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config " + file);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(file + ": " + e.what());
  }
  return parse_experiment(doc);
}

json to_json(const ScenarioConfig& s) {
  json obstacles = json::array();
  for (const auto& poly : s.map.obstacles) {
    json p = json::array();
    for (Vec2 v : poly) p.push_back({v.x, v.y});
    obstacles.push_back(p);
  }
  return {
      {"id", s.id},
      {"bounds", {{"min", {s.map.bounds.min.x, s.map.bounds.min.y}}, {"max", {s.map.bounds.max.x, s.map.bounds.max.y}}}},
      {"obstacles", obstacles},
      {"source", {s.source.x, s.source.y}},
      {"start", {s.start.x, s.start.y}},
      {"radio",
       {{"frequency_hz", s.radio.frequency_hz},
        {"tx_power_dbm", s.radio.tx_power_dbm},
        {"tx_extra_gain_db", s.radio.tx_extra_gain_db},
        {"sensitivity_offset_db", s.radio.sensitivity_offset_db},
        {"path_loss_exponent", s.radio.path_loss_exponent},
        {"antenna_height_m", s.radio.antenna_height_m},
        {"near_field_clamp_m", s.radio.near_field_clamp_m}}},
      {"noise", {{"shadowing_sigma_db", s.noise.shadowing_sigma_db}}},
      {"motion", {{"v_lin", s.v_lin}, {"v_ang", s.v_ang}, {"sample_rate_hz", s.sample_rate_hz}}},
  };
}

json to_json(const ExperimentSpec& spec) {
  json planner = {{"cell_size_candidates", spec.planner.cell_size_candidates},
                  {"max_edge", spec.planner.max_edge},
                  {"time_budgets", spec.planner.time_budgets}};
  if (spec.planner.cell_size) planner["cell_size"] = *spec.planner.cell_size;

  json estimators = json::array();
  for (const auto& e : spec.estimators) {
    json j = {{"method", method_name(e.method)}};
    switch (e.method) {
      case Method::tile: j["tile_edge"] = e.tile_edge; break;
      case Method::biharmonic:
      case Method::cubic: j["spacing"] = e.spacing; break;
      case Method::active_sensing:
        j["n_particles"] = e.n_particles;
        j["time_budget_s"] = e.time_budget_s;
        j["roughening_sigma_m"] = e.roughening_sigma_m;
        break;
      case Method::peak: break;
    }
    estimators.push_back(j);
  }
  return {
      {"scenario", to_json(spec.scenario)},
      {"planner", planner},
      {"estimators", estimators},
      {"seeds", spec.seeds},
      {"convergence", {{"step", spec.convergence.step}, {"methods", spec.convergence.methods}}},
      {"output_dir", spec.output_dir},
      {"export_fields", spec.export_fields},
  };
}

}  // namespace sparseloc::cli
