#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace sparseloc {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

/// Axis-aligned rectangle, closed on all sides.
struct Rect {
  Vec2 min;
  Vec2 max;

  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
  Vec2 center() const { return 0.5 * (min + max); }
  bool contains(Vec2 p) const { return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y; }
  Vec2 clamp(Vec2 p) const;
};

/// Simple polygon as an open vertex ring (last vertex connects to the first).
using Polygon = std::vector<Vec2>;

/// Even-odd containment; points on the boundary count as inside.
bool point_in_polygon(Vec2 p, std::span<const Vec2> polygon);

/// True when `p` lies on segment [a, b] within `tol` meters.
bool point_on_segment(Vec2 p, Vec2 a, Vec2 b, double tol = 1e-12);

/// Closed-segment intersection test (touching counts).
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

/// No two non-adjacent edges intersect and no adjacent edges overlap.
bool is_simple_polygon(std::span<const Vec2> polygon);

/// Shortest distance from `p` to segment [a, b].
double distance_to_segment(Vec2 p, Vec2 a, Vec2 b);

/// Wraps an angle to (-pi, pi].
double normalize_angle(double radians);

}  // namespace sparseloc
