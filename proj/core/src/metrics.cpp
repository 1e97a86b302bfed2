#include "sparseloc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sparseloc/errors.hpp"

namespace sparseloc {

double distance_error(Vec2 estimate, Vec2 truth) { return distance(estimate, truth); }

double convergence_tolerance(double final_error) { return std::max(0.1 * final_error, 0.1); }

double converged_at(std::span<const ConvergencePoint> points) {
  if (points.empty()) throw EstimationError("empty convergence series");
  const double final_error = points.back().error;
  const double tol = convergence_tolerance(final_error);
  std::size_t first = points.size() - 1;
  for (std::size_t k = points.size(); k-- > 0;) {
    if (std::abs(points[k].error - final_error) > tol) break;
    first = k;
  }
  return points[first].t;
}

ConvergenceSeries convergence_series(std::span<const Sample> samples, const PrefixEstimator& estimator, Vec2 truth,
                                     double step, std::string method) {
  if (samples.empty()) throw EstimationError("convergence series needs a non-empty log");
  if (!(step > 0.0)) throw DomainError("convergence step must be > 0");
  ConvergenceSeries series;
  series.method = std::move(method);
  const double t0 = samples.front().t;
  const double t_end = samples.back().t;

  std::size_t end = 0;
  auto run = [&](double t, std::size_t prefix) {
    try {
      const Estimate e = estimator(samples.first(prefix));
      series.points.push_back({t, distance_error(e.position, truth)});
    } catch (const EstimationError&) {
    }
  };
  for (std::size_t k = 0;; ++k) {
    const double t = t0 + static_cast<double>(k) * step;
    if (t >= t_end) break;
    while (end < samples.size() && samples[end].t <= t) ++end;
    run(t, end);
  }
  run(t_end, samples.size());
  if (series.points.empty() || series.points.back().t != t_end)
    throw EstimationError("estimator '" + series.method + "' failed on every prefix, including the full log");
  series.converged_at = converged_at(series.points);
  return series;
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw DomainError("quantile of empty data");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

ErrorSummary summarize(std::span<const double> errors) {
  if (errors.empty()) throw DomainError("summarize needs at least one value");
  std::vector<double> s(errors.begin(), errors.end());
  std::sort(s.begin(), s.end());
  ErrorSummary out;
  out.n = s.size();
  out.mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  out.median = quantile_sorted(s, 0.5);
  out.q1 = quantile_sorted(s, 0.25);
  out.q3 = quantile_sorted(s, 0.75);
  out.min = s.front();
  out.max = s.back();
  const double iqr = out.q3 - out.q1;
  const double lo = out.q1 - 1.5 * iqr;
  const double hi = out.q3 + 1.5 * iqr;
  for (double v : s)
    if (v < lo || v > hi) out.outliers.push_back(v);
  return out;
}

}  // namespace sparseloc
