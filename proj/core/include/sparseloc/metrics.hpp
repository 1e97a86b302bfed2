#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sparseloc/estimators.hpp"
#include "sparseloc/simulator.hpp"

namespace sparseloc {

struct ConvergencePoint {
  double t = 0.0;
  double error = 0.0;
};

struct ConvergenceSeries {
  std::string method;
  std::vector<ConvergencePoint> points;
  double converged_at = 0.0;
};

struct ErrorSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<double> outliers;
};

/// Euclidean distance between an estimate and the true source.
double distance_error(Vec2 estimate, Vec2 truth);

/// Tolerance band around the final error: max(10 % of it, 0.1 m).
double convergence_tolerance(double final_error);

/// Earliest point time from which every later error stays inside the tolerance
/// band of the last point's error.
double converged_at(std::span<const ConvergencePoint> points);

/// Estimator run on a time-ordered prefix of a log.
using PrefixEstimator = std::function<Estimate(std::span<const Sample>)>;

/// Runs `estimator` on the prefixes t <= t0, t0 + step, ... and finally on the full
/// log. Prefixes where the estimator throws EstimationError are skipped.
ConvergenceSeries convergence_series(std::span<const Sample> samples, const PrefixEstimator& estimator, Vec2 truth,
                                     double step, std::string method);

/// Five-number summary with type-7 quartiles and 1.5 IQR outliers (ascending).
ErrorSummary summarize(std::span<const double> errors);

/// Type-7 (linear interpolation) quantile of sorted data.
double quantile_sorted(std::span<const double> sorted, double q);

}  // namespace sparseloc
