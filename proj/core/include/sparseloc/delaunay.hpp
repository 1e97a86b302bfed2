#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "sparseloc/geometry.hpp"

namespace sparseloc {

/// Delaunay triangulation of a point set with no duplicates.
///
/// Triangles are counter-clockwise. `neighbors[t][k]` is the triangle across the
/// edge opposite vertex k of triangle t, or -1 on the convex hull.
struct Triangulation {
  std::vector<Vec2> points;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 3>> neighbors;

  struct Location {
    int triangle = -1;
    std::array<double, 3> bary{};
  };

  /// Triangle containing `p` (boundary inclusive within `tol` in barycentric
  /// units) and its barycentric coordinates. Linear scan.
  std::optional<Location> locate(Vec2 p, double tol = 1e-12) const;

  std::array<double, 3> barycentric(int triangle, Vec2 p) const;
};

/// Incremental sweep in lexicographic order with Lawson edge flips. Each new point
/// lies outside the current hull, so the hull stays exact. Throws DomainError for
/// fewer than three points, duplicates, or an all-collinear set.
Triangulation delaunay_triangulate(std::span<const Vec2> points);

}  // namespace sparseloc
