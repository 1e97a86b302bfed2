#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "sparseloc/delaunay.hpp"
#include "sparseloc/errors.hpp"
#include "sparseloc/geometry.hpp"
#include "sparseloc/predicates.hpp"

using namespace sparseloc;

TEST_SUITE("geometry") {
  TEST_CASE("point in polygon, boundary inclusive") {
    const Polygon sq{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
    CHECK(point_in_polygon({1, 1}, sq));
    CHECK(point_in_polygon({0, 1}, sq));
    CHECK(point_in_polygon({2, 2}, sq));
    CHECK_FALSE(point_in_polygon({2.0001, 1}, sq));
    const Polygon ring{{0, 0}, {4, 0}, {4, 4}, {0, 4}, {0, 0}, {1, 1}, {1, 3}, {3, 3}, {3, 1}, {1, 1}};
    CHECK_FALSE(point_in_polygon({2, 2}, ring));
    CHECK(point_in_polygon({0.5, 2}, ring));
  }

  TEST_CASE("simple polygons") {
    CHECK(is_simple_polygon(Polygon{{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
    CHECK_FALSE(is_simple_polygon(Polygon{{0, 0}, {1, 1}, {1, 0}, {0, 1}}));
    CHECK_FALSE(is_simple_polygon(Polygon{{0, 0}, {1, 0}}));
  }

  TEST_CASE("segments and distances") {
    CHECK(segments_intersect({0, 0}, {2, 2}, {0, 2}, {2, 0}));
    CHECK(segments_intersect({0, 0}, {1, 0}, {1, 0}, {2, 5}));
    CHECK_FALSE(segments_intersect({0, 0}, {1, 0}, {0, 1}, {1, 1}));
    CHECK(distance_to_segment({0, 1}, {-1, 0}, {1, 0}) == doctest::Approx(1.0));
    CHECK(distance_to_segment({3, 4}, {0, 0}, {0, 0}) == doctest::Approx(5.0));
    CHECK(point_on_segment({0.5, 0.5}, {0, 0}, {1, 1}));
  }

  TEST_CASE("normalize_angle wraps into (-pi, pi]") {
    const double pi = std::numbers::pi;
    CHECK(normalize_angle(pi) == doctest::Approx(pi));
    CHECK(normalize_angle(-pi) == doctest::Approx(pi));
    CHECK(normalize_angle(3 * pi / 2) == doctest::Approx(-pi / 2));
    CHECK(normalize_angle(7.0) == doctest::Approx(7.0 - 2 * pi));
  }
}

TEST_SUITE("predicates") {
  TEST_CASE("orientation") {
    CHECK(predicates::orient2d({0, 0}, {1, 0}, {0, 1}) == 1);
    CHECK(predicates::orient2d({0, 0}, {0, 1}, {1, 0}) == -1);
    CHECK(predicates::orient2d({0, 0}, {1, 1}, {2, 2}) == 0);
  }

  TEST_CASE("orientation is exact for nearly collinear points") {
    // Points on y = x shifted by one ulp; naive evaluation is unreliable here.
    const double base = 0.5;
    for (int i = 0; i < 64; ++i) {
      const double x = base + i * std::ldexp(1.0, -53);
      const Vec2 c{x, std::nextafter(x, 2.0)};
      CHECK(predicates::orient2d({12, 12}, {24, 24}, c) == 1);
      CHECK(predicates::orient2d({12, 12}, {24, 24}, {x, x}) == 0);
    }
  }

  TEST_CASE("incircle") {
    CHECK(predicates::incircle({0, 0}, {1, 0}, {0, 1}, {0.5, 0.5}) == 1);
    CHECK(predicates::incircle({0, 0}, {1, 0}, {0, 1}, {1, 1}) == 0);
    CHECK(predicates::incircle({0, 0}, {1, 0}, {0, 1}, {2, 2}) == -1);
  }
}

TEST_SUITE("delaunay") {
  TEST_CASE("matches the reference triangulation") {
    const std::vector<Vec2> pts{
        {6.250955, 8.972138}, {7.756857, 2.252072}, {3.001663, 8.735534}, {0.052653, 8.212284},
        {7.970694, 4.67935},  {3.030324, 2.784256}, {2.548696, 4.450763}, {5.045483, 5.534974},
        {9.955003, 7.926619}, {6.221792, 9.889601}, {2.153087, 1.60212},  {6.125396, 0.43942},
        {0.356803, 5.148888}, {4.66206, 9.171678},  {6.292263, 5.141176}, {4.968734, 2.475149},
        {0.11794, 1.924021},  {6.920321, 2.006067}, {3.695363, 0.037342}, {8.300477, 1.544611},
        {2.675993, 8.803322}, {5.097908, 8.471502}, {6.397172, 7.417709}, {0.914956, 5.411438},
        {5.077722, 8.713394}};
    const std::set<std::array<int, 3>> expected{
        {0, 8, 9},    {0, 8, 22},   {0, 9, 24},   {0, 21, 22},  {0, 21, 24},  {1, 4, 17},   {1, 4, 19},
        {1, 17, 19},  {2, 6, 7},    {2, 6, 23},   {2, 7, 21},   {2, 13, 20},  {2, 13, 21},  {2, 20, 23},
        {3, 9, 20},   {3, 12, 16},  {3, 12, 23},  {3, 20, 23},  {4, 8, 19},   {4, 8, 22},   {4, 14, 17},
        {4, 14, 22},  {5, 6, 7},    {5, 6, 16},   {5, 7, 15},   {5, 10, 16},  {5, 10, 18},  {5, 15, 18},
        {6, 12, 16},  {6, 12, 23},  {7, 14, 15},  {7, 14, 22},  {7, 21, 22},  {9, 13, 20},  {9, 13, 24},
        {10, 16, 18}, {11, 15, 17}, {11, 15, 18}, {11, 17, 19}, {13, 21, 24}, {14, 15, 17}};
    const Triangulation t = delaunay_triangulate(pts);
    std::set<std::array<int, 3>> got;
    for (auto tri : t.triangles) {
      std::sort(tri.begin(), tri.end());
      got.insert(tri);
    }
    CHECK(got == expected);
  }

  TEST_CASE("empty circumcircle, orientation and neighbor symmetry on random sets") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<Vec2> pts;
      const int n = 3 + trial * 3;
      for (int i = 0; i < n; ++i) pts.push_back({u(rng), u(rng)});
      if (trial % 5 == 0)  // grid-aligned points exercise cocircular ties
        for (auto& p : pts) p = {std::round(p.x), std::round(p.y)};
      std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
      pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
      bool collinear = true;
      for (std::size_t i = 2; i < pts.size() && collinear; ++i)
        collinear = predicates::orient2d(pts[0], pts[1], pts[i]) == 0;
      if (pts.size() < 3 || collinear) continue;

      const Triangulation t = delaunay_triangulate(pts);
      for (std::size_t k = 0; k < t.triangles.size(); ++k) {
        const auto& tri = t.triangles[k];
        CHECK(predicates::orient2d(pts[tri[0]], pts[tri[1]], pts[tri[2]]) == 1);
        for (std::size_t p = 0; p < pts.size(); ++p)
          CHECK(predicates::incircle(pts[tri[0]], pts[tri[1]], pts[tri[2]], pts[p]) <= 0);
        for (int e = 0; e < 3; ++e) {
          const int nb = t.neighbors[k][e];
          if (nb < 0) continue;
          bool back = false;
          for (int f = 0; f < 3; ++f) back = back || t.neighbors[nb][f] == static_cast<int>(k);
          CHECK(back);
        }
      }
      // Euler: triangles = 2n - 2 - hull vertices.
      int hull_edges = 0;
      for (const auto& nb : t.neighbors)
        for (int e : nb) hull_edges += e < 0;
      CHECK(static_cast<int>(t.triangles.size()) == 2 * static_cast<int>(pts.size()) - 2 - hull_edges);
    }
  }

  TEST_CASE("locate and barycentric coordinates") {
    const std::vector<Vec2> pts{{0, 0}, {4, 0}, {0, 4}, {4, 4}, {1, 2}};
    const Triangulation t = delaunay_triangulate(pts);
    const auto loc = t.locate({2, 1});
    REQUIRE(loc);
    Vec2 back{};
    for (int k = 0; k < 3; ++k) back = back + loc->bary[k] * pts[t.triangles[loc->triangle][k]];
    CHECK(back.x == doctest::Approx(2.0));
    CHECK(back.y == doctest::Approx(1.0));
    CHECK_FALSE(t.locate({5, 5}));
  }

  TEST_CASE("degenerate input") {
    CHECK_THROWS_AS(delaunay_triangulate(std::vector<Vec2>{{0, 0}, {1, 1}}), DomainError);
    CHECK_THROWS_AS(delaunay_triangulate(std::vector<Vec2>{{0, 0}, {1, 1}, {2, 2}, {3, 3}}), DomainError);
    CHECK_THROWS_AS(delaunay_triangulate(std::vector<Vec2>{{0, 0}, {1, 0}, {0, 1}, {1, 0}}), DomainError);
  }
}
