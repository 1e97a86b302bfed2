#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>

#include "sparseloc/coverage_planner.hpp"
#include "sparseloc/errors.hpp"
#include "planner_cases.hpp"

using namespace sparseloc;
using namespace sparseloc::testing;

namespace {

const FieldMap kCourt{{{-15, -28}, {0, 0}}, {}, 1.0};

}  // namespace

TEST_SUITE("planner") {
  TEST_CASE("court rasterizes to 420 free cells") {
    const auto g = rasterize(kCourt);
    CHECK(g.width() == 15);
    CHECK(g.height() == 28);
    CHECK(g.free_count() == 420);
  }

  TEST_CASE("bounds fully covered by one obstacle") {
    FieldMap m{{{0, 0}, {5, 5}}, {{{0, 0}, {5, 0}, {5, 5}, {0, 5}}}, 1.0};
    CHECK(rasterize(m).free_count() == 0);
  }

  TEST_CASE("2x2 m square obstacle marks exactly 4 cells") {
    FieldMap m{{{0, 0}, {10, 10}}, {{{3.2, 4.1}, {5.2, 4.1}, {5.2, 6.1}, {3.2, 6.1}}}, 1.0};
    const auto g = rasterize(m);
    CHECK(g.cell_count() - g.free_count() == 4);
    CHECK(g.at({3, 4}) == CellState::obstacle);
    CHECK(g.at({4, 5}) == CellState::obstacle);
  }

  TEST_CASE("cell size larger than the bounds is a configuration error") {
    FieldMap m{{{0, 0}, {3, 10}}, {}, 4.0};
    CHECK_THROWS_AS(rasterize(m), ConfigError);
  }

  TEST_CASE("rasterize matches brute-force containment on random maps") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      const RandomCase rc = random_case(rng);
      const auto g = rasterize(rc.map);
      const int nx = static_cast<int>(std::floor(rc.map.bounds.width() / rc.map.cell_size + 1e-9));
      const int ny = static_cast<int>(std::floor(rc.map.bounds.height() / rc.map.cell_size + 1e-9));
      REQUIRE(g.width() == nx);
      REQUIRE(g.height() == ny);
      const Vec2 origin{rc.map.bounds.min.x + 0.5 * (rc.map.bounds.width() - nx * rc.map.cell_size),
                        rc.map.bounds.min.y + 0.5 * (rc.map.bounds.height() - ny * rc.map.cell_size)};
      for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) {
          const Vec2 c{origin.x + (x + 0.5) * rc.map.cell_size, origin.y + (y + 0.5) * rc.map.cell_size};
          bool blocked = !rc.map.bounds.contains(c);
          for (const auto& poly : rc.map.obstacles) blocked = blocked || inside_brute(c, poly);
          CHECK((g.at({x, y}) == CellState::obstacle) == blocked);
        }
    }
  }

  TEST_CASE("4x4 free grid with max_edge 4 is one block") {
    const auto blocks = build_blocks(rasterize({{{0, 0}, {4, 4}}, {}, 1.0}), 4);
    REQUIRE(blocks.size() == 1);
    CHECK(blocks[0].edge == 4);
    CHECK(blocks[0].center == Vec2{2, 2});
  }

  TEST_CASE("4x4 grid with one obstacle cell") {
    auto g = rasterize({{{0, 0}, {4, 4}}, {}, 1.0});
    g.set({1, 2}, CellState::obstacle);
    const auto blocks = build_blocks(g, 4);
    int cells = 0;
    for (const auto& b : blocks) {
      CHECK(b.edge < 4);
      cells += b.edge * b.edge;
    }
    CHECK(cells == 15);
  }

  TEST_CASE("court blocks cover 420 cells") {
    int cells = 0;
    for (const auto& b : build_blocks(rasterize(kCourt), 4)) cells += b.edge * b.edge;
    CHECK(cells == 420);
  }

  TEST_CASE("max_edge must be a power of two") {
    CHECK_THROWS_AS(build_blocks(rasterize(kCourt), 3), DomainError);
  }

  TEST_CASE("blocks are disjoint and cover exactly the free cells") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 200; ++trial) {
      const RandomCase rc = random_case(rng);
      const auto g = rasterize(rc.map);
      if (g.width() > 32 || g.height() > 32) continue;
      const auto blocks = build_blocks(g, rc.max_edge);
      std::vector<int> owner(g.cell_count(), 0);
      for (const auto& b : blocks) {
        CHECK((b.edge & (b.edge - 1)) == 0);
        CHECK(b.edge <= rc.max_edge);
        for (int dy = 0; dy < b.edge; ++dy)
          for (int dx = 0; dx < b.edge; ++dx) {
            const CellIndex c{b.anchor.x + dx, b.anchor.y + dy};
            REQUIRE(g.in_range(c));
            CHECK(g.at(c) == CellState::free);
            ++owner[static_cast<std::size_t>(c.y) * g.width() + c.x];
          }
      }
      for (int y = 0; y < g.height(); ++y)
        for (int x = 0; x < g.width(); ++x)
          CHECK(owner[static_cast<std::size_t>(y) * g.width() + x] == (g.is_free({x, y}) ? 1 : 0));
    }
  }

  TEST_CASE("adjacency examples") {
    const auto two = build_blocks(rasterize({{{0, 0}, {8, 4}}, {}, 1.0}), 4);
    const auto g2 = block_adjacency(two);
    REQUIRE(g2.edges.size() == 1);
    CHECK(g2.edges[0].weight == doctest::Approx(4.0));

    const auto one = build_blocks(rasterize({{{0, 0}, {4, 4}}, {}, 1.0}), 4);
    CHECK(block_adjacency(one).edges.empty());

    const auto chain = build_blocks(rasterize({{{0, 0}, {3, 1}}, {}, 1.0}), 1);
    const auto g3 = block_adjacency(chain);
    CHECK(g3.edges.size() == 2);
    CHECK(g3.connected());

    // Diagonal contact is not adjacency.
    auto g = rasterize({{{0, 0}, {2, 2}}, {}, 1.0});
    g.set({1, 0}, CellState::obstacle);
    g.set({0, 1}, CellState::obstacle);
    const auto diag = block_adjacency(build_blocks(g, 1));
    CHECK(diag.edges.empty());
    CHECK(diag.component_count == 2);
  }

  TEST_CASE("MST textbook cases") {
    BlockGraph tri;
    tri.vertex_count = 3;
    tri.edges = {{0, 1, 1.0}, {1, 2, 2.0}, {0, 2, 3.0}};
    const auto t = minimum_spanning_tree(tri);
    CHECK(t.total_weight == 3.0);
    CHECK(t.edges.size() == 2);

    BlockGraph path;
    path.vertex_count = 4;
    path.edges = {{0, 1, 5.0}, {1, 2, 1.0}, {2, 3, 7.0}};
    CHECK(minimum_spanning_tree(path).total_weight == 13.0);

    BlockGraph split;
    split.vertex_count = 4;
    split.edges = {{0, 1, 1.0}, {2, 3, 1.0}};
    CHECK_THROWS_WITH_AS(minimum_spanning_tree(split), doctest::Contains("component 1"), DomainError);
  }

  TEST_CASE("MST weight matches exhaustive enumeration") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = 2 + static_cast<std::size_t>(trial % 9);  // 2..10 vertices
      const BlockGraph g = random_connected_graph(rng, n);
      const auto t = minimum_spanning_tree(g);
      CHECK(t.edges.size() == n - 1);
      CHECK(t.total_weight == doctest::Approx(brute_force_mst(n, g.edges)));
    }
  }

  TEST_CASE("estimate_duration examples") {
    const std::vector<Vec2> straight{{0, 0}, {8, 0}};
    CHECK(estimate_duration(straight, 0.8, 0.75) == doctest::Approx(10.0));
    const std::vector<Vec2> loop{{0, 0}, {8, 0}, {8, 8}, {0, 8}, {0, 0}};
    CHECK(estimate_duration(loop, 0.8, 0.75) == doctest::Approx(46.283185307179586).epsilon(1e-12));
    const std::vector<Vec2> single{{3, 3}};
    CHECK(estimate_duration(single, 0.8, 0.75) == 0.0);
    CHECK_THROWS_AS(estimate_duration(straight, 0.0, 0.75), ConfigError);
  }

  TEST_CASE("single 4x4 block: center plus four quarter centers") {
    const FieldMap m{{{0, 0}, {4, 4}}, {}, 1.0};
    const auto p = plan_coverage(m, {1.0, 4, 1000.0}, 0.8, 0.75, {0.5, 0.5});
    REQUIRE(p.waypoints.size() == 6);
    CHECK(p.waypoints[1] == Vec2{2, 2});
    std::set<std::pair<double, double>> q;
    for (std::size_t i = 2; i < 6; ++i) q.insert({p.waypoints[i].x, p.waypoints[i].y});
    CHECK(q == std::set<std::pair<double, double>>{{1, 1}, {3, 1}, {1, 3}, {3, 3}});
    CHECK(p.visited_blocks.size() == 1);
  }

  TEST_CASE("two-block tree with a one-block budget") {
    const FieldMap m{{{0, 0}, {8, 4}}, {}, 1.0};
    const Vec2 start{2, 2};
    const auto full = plan_coverage(m, {1.0, 4, 1e6}, 0.8, 0.75, start);
    REQUIRE(full.visited_blocks.size() == 2);
    // Cost of the first block alone, from the same waypoints.
    std::vector<Vec2> first;
    for (const auto& w : full.waypoints) {
      first.push_back(w);
      if (first.size() == 5) break;
    }
    const double one = estimate_duration(first, 0.8, 0.75);
    const auto cut = plan_coverage(m, {1.0, 4, one + 1e-9}, 0.8, 0.75, start);
    CHECK(cut.visited_blocks.size() == 1);
    CHECK(cut.estimated_duration == doctest::Approx(one));
    const auto tight = plan_coverage(m, {1.0, 4, one - 1e-6}, 0.8, 0.75, start);
    CHECK(tight.visited_blocks.empty());
    CHECK(tight.waypoints.size() == 1);
  }

  TEST_CASE("start in an obstacle is rejected") {
    FieldMap m{{{0, 0}, {6, 6}}, {{{2, 2}, {4, 2}, {4, 4}, {2, 4}}}, 1.0};
    CHECK_THROWS_AS(plan_coverage(m, {1.0, 2, 100.0}, 0.8, 0.75, {3, 3}), DomainError);
    CHECK_NOTHROW(plan_coverage(m, {1.0, 2, 100.0}, 0.8, 0.75, {0.5, 0.5}));
  }

  TEST_CASE("court with two budgets gives two maps of different sparsity") {
    const std::vector<double> cand{1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0};
    const Vec2 start{-14.5, -20.5};
    const double cs_a = select_cell_size(kCourt, cand, 4, 700.0, 0.8, 0.75, start);
    const double cs_b = select_cell_size(kCourt, cand, 4, 1550.0, 0.8, 0.75, start);
    CHECK(cs_a == 1.25);
    CHECK(cs_b == 1.0);
    const auto a = plan_coverage(kCourt, {cs_a, 4, 700.0}, 0.8, 0.75, start);
    const auto b = plan_coverage(kCourt, {cs_b, 4, 1550.0}, 0.8, 0.75, start);
    CHECK(a.waypoints.size() < b.waypoints.size());
    CHECK(a.estimated_duration <= 700.0);
    CHECK(b.estimated_duration <= 1550.0);
  }

  TEST_CASE("random maps: budget, monotonicity, free-space waypoints and segments") {
    std::mt19937_64 rng(14);
    int planned = 0;
    for (int trial = 0; trial < 200; ++trial) {
      RandomCase rc = random_case(rng);
      const auto g = rasterize(rc.map);
      const auto start = random_free_center(g, rng);
      if (!start) continue;
      ++planned;
      const PlannerConfig cfg{rc.map.cell_size, rc.max_edge, rc.budget};
      const auto p = plan_coverage(rc.map, cfg, 0.8, 0.75, *start);
      CHECK(p.estimated_duration <= rc.budget);
      CHECK(p.estimated_duration == doctest::Approx(estimate_duration(p.waypoints, 0.8, 0.75)));
      CHECK(p.waypoints.front() == *start);

      for (std::size_t i = 0; i < p.waypoints.size(); ++i) {
        CHECK(point_in_free_space(g, p.waypoints[i]));
        if (i == 0) continue;
        for (int s = 1; s < 64; ++s) {
          const double t = s / 64.0;
          CHECK(point_in_free_space(g, (1 - t) * p.waypoints[i - 1] + t * p.waypoints[i]));
        }
      }

      const auto bigger = plan_coverage(rc.map, {rc.map.cell_size, rc.max_edge, rc.budget * 1.7}, 0.8, 0.75, *start);
      REQUIRE(bigger.visited_blocks.size() >= p.visited_blocks.size());
      CHECK(std::equal(p.visited_blocks.begin(), p.visited_blocks.end(), bigger.visited_blocks.begin()));
      CHECK(std::equal(p.waypoints.begin(), p.waypoints.end(), bigger.waypoints.begin()));
    }
    CHECK(planned > 150);
  }

  TEST_CASE("disconnected free space plans only the start's region") {
    FieldMap m{{{0, 0}, {9, 4}}, {{{4, -0.0}, {5, 0}, {5, 4}, {4, 4}}}, 1.0};
    const auto p = plan_coverage(m, {1.0, 2, 1e6}, 0.8, 0.75, {0.5, 0.5});
    for (const auto& w : p.waypoints) CHECK(w.x < 4.0);
    CHECK_FALSE(p.visited_blocks.empty());
  }

  TEST_CASE("path CSV round-trip") {
    const auto p = plan_coverage(kCourt, {2.5, 2, 300.0}, 0.8, 0.75, {-14.5, -27.5});
    const std::string file = "planner_roundtrip.csv";
    write_path_csv(p, file);
    CHECK(read_path_csv(file) == p.waypoints);
    std::remove(file.c_str());
  }
}
