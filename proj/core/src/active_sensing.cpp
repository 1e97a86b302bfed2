#include "sparseloc/active_sensing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sparseloc {

double ParticleSet::effective_sample_size() const {
  double s2 = 0.0;
  for (double w : weights) s2 += w * w;
  return s2 > 0.0 ? 1.0 / s2 : 0.0;
}

Vec2 ParticleSet::weighted_mean() const {
  Vec2 m;
  for (std::size_t i = 0; i < positions.size(); ++i) m = m + weights[i] * positions[i];
  return m;
}

bool ParticleSet::normalize() {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0) || !std::isfinite(total)) return false;
  for (double& w : weights) w /= total;
  return true;
}

namespace {

bool in_free_space(const FieldMap& map, Vec2 p) {
  if (!map.bounds.contains(p)) return false;
  for (const auto& poly : map.obstacles)
    if (point_in_polygon(p, poly)) return false;
  return true;
}

bool segment_clear(const FieldMap& map, Vec2 a, Vec2 b) {
  for (const auto& poly : map.obstacles) {
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++)
      if (segments_intersect(a, b, poly[i], poly[j])) return false;
    if (point_in_polygon(a, poly) || point_in_polygon(b, poly)) return false;
  }
  return true;
}

}  // namespace

ParticleSet uniform_particles(const FieldMap& map, int n) {
  if (n < 1) throw DomainError("particle count must be >= 1");
  const double w = map.bounds.width();
  const double h = map.bounds.height();
  const int nx = std::max(1, static_cast<int>(std::lround(std::sqrt(n * w / h))));
  const int ny = std::max(1, static_cast<int>(std::ceil(static_cast<double>(n) / nx)));
  ParticleSet set;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Vec2 p{map.bounds.min.x + (i + 0.5) * w / nx, map.bounds.min.y + (j + 0.5) * h / ny};
      if (in_free_space(map, p)) set.positions.push_back(p);
    }
  }
  if (set.positions.empty()) throw DomainError("no free space for particles");
  set.weights.assign(set.positions.size(), 1.0 / static_cast<double>(set.positions.size()));
  return set;
}

bool reweight(ParticleSet& set, Vec2 receiver, double rssi, const RadioLinkParams& radio, double sigma_db) {
  const double sigma = std::max(sigma_db, 1e-6);
  std::vector<double> loglik(set.size(), -std::numeric_limits<double>::infinity());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (!(set.weights[i] > 0.0)) continue;
    const double d = std::max(distance(set.positions[i], receiver), radio.near_field_clamp_m);
    const double r = (rssi - received_power(d, radio)) / sigma;
    loglik[i] = -0.5 * r * r;
    best = std::max(best, loglik[i]);
  }
  if (!std::isfinite(best)) return false;
  std::vector<double> updated(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) updated[i] = set.weights[i] * std::exp(loglik[i] - best);
  std::swap(updated, set.weights);
  if (!set.normalize()) {
    std::swap(updated, set.weights);
    return false;
  }
  return true;
}

ParticleSet systematic_resample(const ParticleSet& set, double u0) {
  const std::size_t n = set.size();
  ParticleSet out;
  out.positions.reserve(n);
  const double step = 1.0 / static_cast<double>(n);
  double c = set.weights[0];
  std::size_t i = 0;
  for (std::size_t m = 0; m < n; ++m) {
    const double u = (u0 + static_cast<double>(m)) * step;
    while (u > c && i + 1 < n) c += set.weights[++i];
    out.positions.push_back(set.positions[i]);
  }
  out.weights.assign(n, step);
  return out;
}

ActiveSensingResult active_sensing_run(const ScenarioConfig& scenario, const ActiveSensingConfig& config,
                                       Diagnostics* diag) {
  scenario.validate();
  if (config.n_particles < 100) throw ConfigError("active sensing needs at least 100 particles");
  if (!(config.time_budget_s >= 0.0)) throw ConfigError("active sensing time budget must be >= 0");

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> ux(scenario.map.bounds.min.x, scenario.map.bounds.max.x);
  std::uniform_real_distribution<double> uy(scenario.map.bounds.min.y, scenario.map.bounds.max.y);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, 1.0);

  // Random waypoint route long enough to exhaust the time budget.
  std::vector<Vec2> route{scenario.start};
  while (estimate_duration(route, scenario.v_lin, scenario.v_ang) <= config.time_budget_s) {
    Vec2 next;
    int tries = 0;
    do {
      next = {ux(rng), uy(rng)};
      if (++tries > 1000) throw DomainError("could not draw a reachable random waypoint");
    } while (!in_free_space(scenario.map, next) || !segment_clear(scenario.map, route.back(), next));
    route.push_back(next);
  }

  ActiveSensingResult result;
  result.log.scenario_id = scenario.id;
  result.particles = uniform_particles(scenario.map, config.n_particles);
  const ParticleSet prior = result.particles;
  const TraverseClock clock(route, scenario.v_lin, scenario.v_ang);
  NoiseStream stream(scenario.noise.seed);
  const double period = 1.0 / scenario.sample_rate_hz;
  const double half = 0.5 * static_cast<double>(result.particles.size());

  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * period;
    if (t > config.time_budget_s + 1e-9) break;
    if (config.measurement_budget && k >= *config.measurement_budget) break;
    const Vec2 pos = clock.state_at(t).position;
    const double rssi = sample_rssi(scenario.source, pos, scenario.radio, scenario.noise, stream).rssi_dbm;
    result.log.samples.push_back({t, pos.x, pos.y, rssi});

    if (!reweight(result.particles, pos, rssi, scenario.radio, scenario.noise.shadowing_sigma_db)) {
      result.particles = prior;
      ++result.reinit_count;
      if (diag) diag->warn("particle weights degenerated at t=" + std::to_string(t) + "; reinitialized");
    }
    if (result.particles.effective_sample_size() < half) {
      result.particles = systematic_resample(result.particles, unit(rng));
      ++result.resample_count;
      if (config.roughening_sigma_m > 0.0) {
        for (auto& p : result.particles.positions) {
          const Vec2 moved{p.x + config.roughening_sigma_m * jitter(rng), p.y + config.roughening_sigma_m * jitter(rng)};
          if (in_free_space(scenario.map, moved)) p = moved;
        }
      }
    }
    const Vec2 est = result.particles.weighted_mean();
    result.estimates.push_back({t, est});
    result.convergence.points.push_back({t, distance_error(est, scenario.source)});
  }

  result.convergence.method = "active_sensing";
  if (!result.convergence.points.empty()) result.convergence.converged_at = converged_at(result.convergence.points);
  const Vec2 final_pos = result.particles.weighted_mean();
  result.estimate = {"active_sensing", final_pos, 0.0, distance_error(final_pos, scenario.source)};
  return result;
}

}  // namespace sparseloc
