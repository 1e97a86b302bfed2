#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sparseloc/delaunay.hpp"
#include "sparseloc/errors.hpp"
#include "sparseloc/estimators.hpp"
#include "sparseloc/simulator.hpp"

namespace sparseloc {

/// Regular query lattice: node (i, j) sits at origin + (i, j) * spacing.
struct FieldSpec {
  Vec2 origin;
  double spacing = 0.25;
  int nx = 0;
  int ny = 0;

  Vec2 node(int i, int j) const { return {origin.x + i * spacing, origin.y + j * spacing}; }
  /// Lattice over `bounds` with nodes on both bounding edges where they fit.
  static FieldSpec over_bounds(const Rect& bounds, double spacing = 0.25);
};

struct InterpolatedField {
  FieldSpec spec;
  std::vector<double> values;  // row-major by j, NaN where undefined

  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * spec.nx + i]; }
  void write_csv(std::ostream& out) const;
};

struct ScatteredData {
  std::vector<Vec2> points;
  std::vector<double> values;
};

/// Merges samples taken at identical positions by averaging their RSSI. A warning
/// is recorded in `diag` when anything was merged.
ScatteredData deduplicate(std::span<const Sample> samples, Diagnostics* diag = nullptr);

/// Green's function of the biharmonic operator in 2-D: r^2 (ln r - 1), g(0) = 0.
double biharmonic_green(double r);

/// Biharmonic spline w(x) = sum_j alpha_j g(|x - x_j|) through the data.
class BiharmonicSpline {
 public:
  /// Throws EstimationError for fewer than three distinct or all-collinear points,
  /// or when the Green's matrix is numerically singular.
  explicit BiharmonicSpline(ScatteredData data);

  double operator()(Vec2 p) const;
  std::span<const double> weights() const { return alpha_; }
  /// max_i |G alpha - w|_i for the fitted system.
  double residual() const { return residual_; }

 private:
  ScatteredData data_;
  std::vector<double> alpha_;
  double residual_ = 0.0;
};

/// C1 piecewise-cubic Clough-Tocher interpolant on a Delaunay triangulation.
/// Vertex gradients minimise the summed squared second derivative of the edge
/// cubics (a global sparse solve). Undefined (NaN) outside the convex hull.
class CloughTocher {
 public:
  explicit CloughTocher(ScatteredData data);

  double operator()(Vec2 p) const;
  /// Evaluates inside a known triangle with barycentric coordinates `bary`.
  double evaluate(int triangle, const std::array<double, 3>& bary) const;

  const Triangulation& triangulation() const { return tri_; }
  std::span<const Vec2> gradients() const { return grad_; }

 private:
  ScatteredData data_;
  Triangulation tri_;
  std::vector<Vec2> grad_;
};

InterpolatedField interpolate_biharmonic(std::span<const Sample> samples, const FieldSpec& spec,
                                         Diagnostics* diag = nullptr);
InterpolatedField interpolate_cubic(std::span<const Sample> samples, const FieldSpec& spec,
                                    Diagnostics* diag = nullptr);

/// Node with the largest defined value; ties go to the lowest row-major index.
Estimate estimate_field_argmax(const InterpolatedField& field, std::string method_label);

}  // namespace sparseloc
