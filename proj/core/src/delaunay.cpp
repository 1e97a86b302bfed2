#include "sparseloc/delaunay.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <unordered_map>

#include "sparseloc/errors.hpp"
#include "sparseloc/predicates.hpp"

namespace sparseloc {

namespace {

using predicates::incircle;
using predicates::orient2d;

class Builder {
 public:
  explicit Builder(std::span<const Vec2> pts) : pts_(pts), n_(pts.size()) {}

  Triangulation run() {
    if (n_ < 3) throw DomainError("triangulation needs at least three points");
    std::vector<int> order(n_);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const Vec2 pa = pts_[static_cast<std::size_t>(a)], pb = pts_[static_cast<std::size_t>(b)];
      return pa.x < pb.x || (pa.x == pb.x && pa.y < pb.y);
    });
    for (std::size_t i = 1; i < n_; ++i)
      if (pt(order[i]) == pt(order[i - 1])) throw DomainError("duplicate point in triangulation input");

    std::size_t first_off = 2;
    while (first_off < n_ && orient2d(pt(order[0]), pt(order[1]), pt(order[first_off])) == 0) ++first_off;
    if (first_off == n_) throw DomainError("all points are collinear");

    seed_fan(order, first_off);
    for (std::size_t i = first_off + 1; i < n_; ++i) insert(order[i]);
    return finish();
  }

 private:
  Vec2 pt(int i) const { return pts_[static_cast<std::size_t>(i)]; }
  std::uint64_t key(int a, int b) const { return static_cast<std::uint64_t>(a) * n_ + static_cast<std::uint64_t>(b); }

  int add_triangle(int a, int b, int c) {
    const int t = static_cast<int>(tris_.size());
    tris_.push_back({a, b, c});
    index_edges(t);
    return t;
  }

  void index_edges(int t) {
    const auto& v = tris_[static_cast<std::size_t>(t)];
    for (int k = 0; k < 3; ++k) edges_[key(v[k], v[(k + 1) % 3])] = t;
  }

  void unindex_edges(int t) {
    const auto& v = tris_[static_cast<std::size_t>(t)];
    for (int k = 0; k < 3; ++k) edges_.erase(key(v[k], v[(k + 1) % 3]));
  }

  int triangle_with(int a, int b) const {
    const auto it = edges_.find(key(a, b));
    return it == edges_.end() ? -1 : it->second;
  }

  // Fan from the first off-line point to the collinear run before it.
  void seed_fan(const std::vector<int>& order, std::size_t apex_pos) {
    const int apex = order[apex_pos];
    const bool left = orient2d(pt(order[0]), pt(order[1]), pt(apex)) > 0;
    for (std::size_t i = 0; i + 1 < apex_pos; ++i) {
      const int a = order[i], b = order[i + 1];
      if (left)
        add_triangle(a, b, apex);
      else
        add_triangle(b, a, apex);
    }
    if (left) {
      for (std::size_t i = 0; i < apex_pos; ++i) hull_.push_back(order[i]);
    } else {
      for (std::size_t i = apex_pos; i-- > 0;) hull_.push_back(order[i]);
    }
    hull_.push_back(apex);
  }

  void insert(int p) {
    const std::size_t h = hull_.size();
    std::vector<char> visible(h, 0);
    bool any = false;
    for (std::size_t i = 0; i < h; ++i) {
      visible[i] = orient2d(pt(hull_[i]), pt(hull_[(i + 1) % h]), pt(p)) < 0;
      any = any || visible[i];
    }
    if (!any) throw DomainError("sweep insertion found no visible hull edge");
    std::size_t s = 0;
    while (!(visible[s] && !visible[(s + h - 1) % h])) ++s;
    std::size_t e = s;  // hull_[e] is the last vertex of the visible chain
    std::vector<std::pair<int, int>> new_edges;
    while (visible[e % h]) {
      const int a = hull_[e % h], b = hull_[(e + 1) % h];
      add_triangle(b, a, p);
      new_edges.emplace_back(b, a);
      ++e;
    }
    std::vector<int> hull;
    for (std::size_t i = e; i != s + h + 1; ++i) hull.push_back(hull_[i % h]);
    hull.push_back(p);
    hull_ = std::move(hull);
    for (auto [a, b] : new_edges) legalize(a, b, p);
  }

  // Edge a->b belongs to a triangle whose third vertex is p.
  void legalize(int a, int b, int p) {
    const int t1 = triangle_with(a, b);
    const int t2 = triangle_with(b, a);
    if (t1 < 0 || t2 < 0) return;
    const auto& v2 = tris_[static_cast<std::size_t>(t2)];
    int d = -1;
    for (int k = 0; k < 3; ++k)
      if (v2[k] != a && v2[k] != b) d = v2[k];
    if (incircle(pt(a), pt(b), pt(p), pt(d)) <= 0) return;
    unindex_edges(t1);
    unindex_edges(t2);
    tris_[static_cast<std::size_t>(t1)] = {a, d, p};
    tris_[static_cast<std::size_t>(t2)] = {d, b, p};
    index_edges(t1);
    index_edges(t2);
    legalize(a, d, p);
    legalize(d, b, p);
  }

  Triangulation finish() {
    Triangulation out;
    out.points.assign(pts_.begin(), pts_.end());
    out.triangles = tris_;
    out.neighbors.resize(tris_.size());
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      const auto& v = tris_[t];
      for (int k = 0; k < 3; ++k) out.neighbors[t][k] = triangle_with(v[(k + 2) % 3], v[(k + 1) % 3]);
    }
    return out;
  }

  std::span<const Vec2> pts_;
  std::size_t n_;
  std::vector<std::array<int, 3>> tris_;
  std::unordered_map<std::uint64_t, int> edges_;
  std::vector<int> hull_;  // counter-clockwise
};

}  // namespace

Triangulation delaunay_triangulate(std::span<const Vec2> points) { return Builder(points).run(); }

std::array<double, 3> Triangulation::barycentric(int triangle, Vec2 p) const {
  const auto& v = triangles[static_cast<std::size_t>(triangle)];
  const Vec2 a = points[static_cast<std::size_t>(v[0])];
  const Vec2 b = points[static_cast<std::size_t>(v[1])];
  const Vec2 c = points[static_cast<std::size_t>(v[2])];
  const double det = cross(b - a, c - a);
  const double l1 = cross(c - p, a - p) / det;
  const double l2 = cross(a - p, b - p) / det;
  return {1.0 - l1 - l2, l1, l2};
}

std::optional<Triangulation::Location> Triangulation::locate(Vec2 p, double tol) const {
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto b = barycentric(static_cast<int>(t), p);
    if (b[0] >= -tol && b[1] >= -tol && b[2] >= -tol) return Location{static_cast<int>(t), b};
  }
  return std::nullopt;
}

}  // namespace sparseloc
