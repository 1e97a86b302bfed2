#include "sparseloc/coverage_planner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "sparseloc/csv.hpp"
#include "sparseloc/errors.hpp"

namespace sparseloc {

// ---------------------------------------------------------------------------
// FieldMap / OccupancyGrid

void FieldMap::validate() const {
  if (!(bounds.width() > 0.0) || !(bounds.height() > 0.0)) throw ConfigError("map bounds must have positive area");
  if (!(cell_size > 0.0)) throw ConfigError("cell_size must be > 0");
  if (cell_size > bounds.width() + 1e-9 || cell_size > bounds.height() + 1e-9)
    throw ConfigError("cell_size " + csv::format_double(cell_size) + " m exceeds a bounds dimension");
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const auto& poly = obstacles[i];
    if (!is_simple_polygon(poly)) throw ConfigError("obstacle " + std::to_string(i) + " is not a simple polygon");
    for (Vec2 v : poly)
      if (!bounds.contains(v)) throw ConfigError("obstacle " + std::to_string(i) + " extends outside the map bounds");
  }
}

OccupancyGrid::OccupancyGrid(int width, int height, Vec2 origin, double cell_size)
    : width_(width),
      height_(height),
      origin_(origin),
      cell_size_(cell_size),
      cells_(static_cast<std::size_t>(width) * height, CellState::free) {}

std::size_t OccupancyGrid::free_count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), CellState::free));
}

Vec2 OccupancyGrid::cell_center(CellIndex c) const {
  return {origin_.x + (c.x + 0.5) * cell_size_, origin_.y + (c.y + 0.5) * cell_size_};
}

std::optional<CellIndex> OccupancyGrid::cell_of(Vec2 p) const {
  const double fx = (p.x - origin_.x) / cell_size_;
  const double fy = (p.y - origin_.y) / cell_size_;
  if (fx < 0.0 || fy < 0.0 || fx > width_ || fy > height_) return std::nullopt;
  const CellIndex c{std::min(static_cast<int>(std::floor(fx)), width_ - 1),
                    std::min(static_cast<int>(std::floor(fy)), height_ - 1)};
  return c;
}

namespace {

void fill_polygon(OccupancyGrid& grid, std::span<const Vec2> poly) {
  const double cs = grid.cell_size();
  const Vec2 o = grid.origin();
  const std::size_t n = poly.size();
  std::vector<double> crossings;
  for (int iy = 0; iy < grid.height(); ++iy) {
    const double yc = o.y + (iy + 0.5) * cs;
    crossings.clear();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Vec2 a = poly[i];
      const Vec2 b = poly[j];
      if ((a.y > yc) != (b.y > yc)) crossings.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(crossings.begin(), crossings.end());
    for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
      const int first = std::max(0, static_cast<int>(std::ceil((crossings[k] - o.x) / cs - 0.5)));
      const int last = std::min(grid.width() - 1, static_cast<int>(std::floor((crossings[k + 1] - o.x) / cs - 0.5)));
      for (int ix = first; ix <= last; ++ix) grid.set({ix, iy}, CellState::obstacle);
    }
    // Boundary points count as inside; the span fill misses centers that sit
    // exactly on a horizontal edge or on a local-maximum vertex.
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Vec2 a = poly[i];
      const Vec2 b = poly[j];
      if (yc < std::min(a.y, b.y) || yc > std::max(a.y, b.y)) continue;
      double lo = std::min(a.x, b.x);
      double hi = std::max(a.x, b.x);
      if (a.y != b.y) {
        const double x = a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y);
        lo = hi = x;
      }
      const int first = std::max(0, static_cast<int>(std::floor((lo - o.x) / cs - 0.5)));
      const int last = std::min(grid.width() - 1, static_cast<int>(std::ceil((hi - o.x) / cs - 0.5)));
      for (int ix = first; ix <= last; ++ix)
        if (point_on_segment(grid.cell_center({ix, iy}), a, b)) grid.set({ix, iy}, CellState::obstacle);
    }
  }
}

class DurationAccumulator {
 public:
  DurationAccumulator(double v_lin, double v_ang) : v_lin_(v_lin), v_ang_(v_ang) {}

  void add(Vec2 p) {
    if (!has_last_) {
      last_ = p;
      has_last_ = true;
      return;
    }
    const Vec2 d = p - last_;
    const double len = norm(d);
    if (len == 0.0) return;
    const double heading = std::atan2(d.y, d.x);
    if (has_heading_) total_ += std::abs(normalize_angle(heading - heading_)) / v_ang_;
    total_ += len / v_lin_;
    heading_ = heading;
    has_heading_ = true;
    last_ = p;
  }
  double total() const { return total_; }

 private:
  double v_lin_;
  double v_ang_;
  double total_ = 0.0;
  Vec2 last_;
  double heading_ = 0.0;
  bool has_last_ = false;
  bool has_heading_ = false;
};

void require_velocities(double v_lin, double v_ang) {
  if (!(v_lin > 0.0) || !(v_ang > 0.0)) throw ConfigError("velocities must be positive");
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[b] = a;
    return true;
  }
};

bool center_less(Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

// Total absolute heading change along a polyline, skipping repeated points.
double turning(std::span<const Vec2> pts) {
  double total = 0.0;
  std::optional<double> heading;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const Vec2 d = pts[i] - pts[i - 1];
    if (d.x == 0.0 && d.y == 0.0) continue;
    const double h = std::atan2(d.y, d.x);
    if (heading) total += std::abs(normalize_angle(h - *heading));
    heading = h;
  }
  return total;
}

// Orders the four quarter-centers to minimise turning between the entry and
// exit moves. Candidates are tried clockwise first, starting from the quarter
// first met sweeping clockwise from the entry heading; the first strict minimum wins.
std::vector<Vec2> order_quarters(const Block& block, std::optional<Vec2> prev, std::optional<Vec2> next) {
  const std::vector<Vec2> q = block.quarter_centers();  // counter-clockwise
  const Vec2 c = block.center;
  double entry_heading = 0.0;
  if (prev && !(*prev == c)) entry_heading = std::atan2(c.y - prev->y, c.x - prev->x);

  std::array<int, 4> by_cw{0, 1, 2, 3};
  std::array<double, 4> cw_offset{};
  for (int i = 0; i < 4; ++i) {
    const double a = std::atan2(q[i].y - c.y, q[i].x - c.x);
    double off = entry_heading - a;  // clockwise angle from entry heading
    off = std::fmod(off, 2.0 * std::numbers::pi);
    if (off < 0.0) off += 2.0 * std::numbers::pi;
    cw_offset[i] = off;
  }
  std::sort(by_cw.begin(), by_cw.end(), [&](int a, int b) { return cw_offset[a] < cw_offset[b]; });

  std::vector<Vec2> best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int dir : {-1, +1}) {  // -1: clockwise, +1: counter-clockwise
    for (int s : by_cw) {
      std::vector<Vec2> seq;
      if (prev) seq.push_back(*prev);
      seq.push_back(c);
      std::vector<Vec2> order;
      for (int k = 0; k < 4; ++k) order.push_back(q[static_cast<std::size_t>(((s + dir * k) % 4 + 4) % 4)]);
      seq.insert(seq.end(), order.begin(), order.end());
      if (next) {
        seq.push_back(c);
        seq.push_back(*next);
      }
      const double cost = turning(seq);
      if (cost < best_cost - 1e-12) {
        best_cost = cost;
        best = std::move(order);
      }
    }
  }
  return best;
}

}  // namespace

OccupancyGrid rasterize(const FieldMap& map) {
  map.validate();
  const double cs = map.cell_size;
  const int nx = static_cast<int>(std::floor(map.bounds.width() / cs + 1e-9));
  const int ny = static_cast<int>(std::floor(map.bounds.height() / cs + 1e-9));
  const Vec2 origin{map.bounds.min.x + 0.5 * (map.bounds.width() - nx * cs),
                    map.bounds.min.y + 0.5 * (map.bounds.height() - ny * cs)};
  OccupancyGrid grid(nx, ny, origin, cs);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      if (!map.bounds.contains(grid.cell_center({ix, iy}))) grid.set({ix, iy}, CellState::obstacle);
  for (const auto& poly : map.obstacles) fill_polygon(grid, poly);
  return grid;
}

// ---------------------------------------------------------------------------
// Blocks

Rect Block::extent() const {
  const double h = 0.5 * edge_m;
  return {{center.x - h, center.y - h}, {center.x + h, center.y + h}};
}

std::vector<Vec2> Block::quarter_centers() const {
  const double q = 0.25 * edge_m;
  return {{center.x - q, center.y - q}, {center.x + q, center.y - q}, {center.x + q, center.y + q},
          {center.x - q, center.y + q}};
}

std::vector<Block> build_blocks(const OccupancyGrid& grid, int max_edge) {
  if (max_edge < 1 || (max_edge & (max_edge - 1)) != 0)
    throw DomainError("max_edge must be a power of two, got " + std::to_string(max_edge));
  const int w = grid.width();
  const int h = grid.height();
  std::vector<char> claimed(static_cast<std::size_t>(w) * h, 0);
  auto available = [&](int x, int y) {
    return grid.at({x, y}) == CellState::free && !claimed[static_cast<std::size_t>(y) * w + x];
  };

  std::vector<Block> blocks;
  for (int e = max_edge; e >= 1; e /= 2) {
    for (int y = 0; y + e <= h; ++y) {
      for (int x = 0; x + e <= w; ++x) {
        bool ok = true;
        for (int dy = 0; dy < e && ok; ++dy)
          for (int dx = 0; dx < e && ok; ++dx) ok = available(x + dx, y + dy);
        if (!ok) continue;
        for (int dy = 0; dy < e; ++dy)
          for (int dx = 0; dx < e; ++dx) claimed[static_cast<std::size_t>(y + dy) * w + x + dx] = 1;
        Block b;
        b.anchor = {x, y};
        b.edge = e;
        b.edge_m = e * grid.cell_size();
        b.center = {grid.origin().x + (x + 0.5 * e) * grid.cell_size(),
                    grid.origin().y + (y + 0.5 * e) * grid.cell_size()};
        blocks.push_back(b);
      }
    }
  }
  return blocks;
}

// ---------------------------------------------------------------------------
// Graph and MST

BlockGraph block_adjacency(std::span<const Block> blocks) {
  BlockGraph g;
  g.vertex_count = blocks.size();
  auto overlap = [](int a0, int a1, int b0, int b1) { return std::min(a1, b1) - std::max(a0, b0); };
  UnionFind uf(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Block& a = blocks[i];
    for (std::size_t j = i + 1; j < blocks.size(); ++j) {
      const Block& b = blocks[j];
      const bool touch_x = (a.anchor.x + a.edge == b.anchor.x || b.anchor.x + b.edge == a.anchor.x) &&
                           overlap(a.anchor.y, a.anchor.y + a.edge, b.anchor.y, b.anchor.y + b.edge) > 0;
      const bool touch_y = (a.anchor.y + a.edge == b.anchor.y || b.anchor.y + b.edge == a.anchor.y) &&
                           overlap(a.anchor.x, a.anchor.x + a.edge, b.anchor.x, b.anchor.x + b.edge) > 0;
      if (touch_x || touch_y) {
        g.edges.push_back({i, j, distance(a.center, b.center)});
        uf.unite(i, j);
      }
    }
  }
  g.component.assign(blocks.size(), -1);
  std::vector<int> label_of_root(blocks.size(), -1);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::size_t r = uf.find(i);
    if (label_of_root[r] < 0) label_of_root[r] = g.component_count++;
    g.component[i] = label_of_root[r];
  }
  return g;
}

std::vector<std::vector<std::size_t>> SpanningTree::adjacency() const {
  std::vector<std::vector<std::size_t>> adj(vertex_count);
  for (const auto& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  return adj;
}

SpanningTree minimum_spanning_tree(const BlockGraph& graph) {
  SpanningTree tree;
  tree.vertex_count = graph.vertex_count;
  std::vector<WeightedEdge> sorted = graph.edges;
  for (auto& e : sorted)
    if (e.v < e.u) std::swap(e.u, e.v);
  std::sort(sorted.begin(), sorted.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    if (a.weight != b.weight) return a.weight < b.weight;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  });
  UnionFind uf(graph.vertex_count);
  for (const auto& e : sorted) {
    if (uf.unite(e.u, e.v)) {
      tree.edges.push_back(e);
      tree.total_weight += e.weight;
    }
  }
  if (graph.vertex_count > 0 && tree.edges.size() + 1 != graph.vertex_count) {
    // Name each component by its lowest vertex and size.
    std::vector<std::size_t> size(graph.vertex_count, 0);
    for (std::size_t i = 0; i < graph.vertex_count; ++i) ++size[uf.find(i)];
    std::ostringstream msg;
    msg << "graph is disconnected:";
    int k = 0;
    for (std::size_t i = 0; i < graph.vertex_count; ++i)
      if (uf.find(i) == i) msg << " component " << k++ << " {first vertex " << i << ", " << size[i] << " vertices}";
    throw DomainError(msg.str());
  }
  return tree;
}

// ---------------------------------------------------------------------------
// Path planning

double estimate_duration(std::span<const Vec2> waypoints, double v_lin, double v_ang) {
  require_velocities(v_lin, v_ang);
  if (waypoints.empty()) throw DomainError("estimate_duration needs at least one waypoint");
  DurationAccumulator acc(v_lin, v_ang);
  for (Vec2 p : waypoints) acc.add(p);
  return acc.total();
}

CoveragePath plan_path(const SpanningTree& tree, std::span<const Block> blocks, const OccupancyGrid& grid,
                       const PlanRequest& request) {
  require_velocities(request.v_lin, request.v_ang);
  if (!(request.time_budget > 0.0)) throw ConfigError("time_budget must be > 0");
  const auto start_cell = grid.cell_of(request.start);
  if (!start_cell || grid.at(*start_cell) != CellState::free)
    throw DomainError("start position lies in an obstacle or outside the grid");
  if (tree.vertex_count != blocks.size()) throw DomainError("tree and block list disagree in size");

  CoveragePath path;
  path.time_budget = request.time_budget;
  path.waypoints.push_back(request.start);
  if (blocks.empty()) return path;

  // Root: the block containing the start cell, else the nearest center.
  std::size_t root = blocks.size();
  for (std::size_t i = 0; i < blocks.size(); ++i)
    if (blocks[i].covers(*start_cell)) root = i;
  if (root == blocks.size()) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const double d = distance(blocks[i].center, request.start);
      if (d < best) {
        best = d;
        root = i;
      }
    }
  }

  // Euler tour of the tree: first occurrences are visits, repeats are returns.
  const auto adj = tree.adjacency();
  std::vector<std::size_t> tour;
  std::vector<char> seen(blocks.size(), 0);
  std::function<void(std::size_t)> dfs = [&](std::size_t v) {
    seen[v] = 1;
    tour.push_back(v);
    std::vector<std::size_t> children;
    for (std::size_t u : adj[v])
      if (!seen[u]) children.push_back(u);
    const Vec2 here = blocks[v].center;
    std::sort(children.begin(), children.end(), [&](std::size_t a, std::size_t b) {
      const double da = distance(here, blocks[a].center);
      const double db = distance(here, blocks[b].center);
      if (da != db) return da < db;
      return center_less(blocks[a].center, blocks[b].center);
    });
    for (std::size_t u : children) {
      if (seen[u]) continue;
      dfs(u);
      tour.push_back(v);
    }
  };
  dfs(root);

  // Split the tour into per-visit segments: transit centers then the visited block.
  struct Visit {
    std::size_t block;
    std::vector<Vec2> transit;  // centers walked through before entering `block`
  };
  std::vector<Visit> visits;
  std::vector<char> visited(blocks.size(), 0);
  std::vector<Vec2> pending;
  for (std::size_t i = 0; i < tour.size(); ++i) {
    const std::size_t b = tour[i];
    if (!visited[b]) {
      visited[b] = 1;
      visits.push_back({b, std::move(pending)});
      pending.clear();
    } else {
      pending.push_back(blocks[b].center);
    }
  }

  DurationAccumulator acc(request.v_lin, request.v_ang);
  acc.add(request.start);
  Vec2 last = request.start;
  for (std::size_t k = 0; k < visits.size(); ++k) {
    const Block& block = blocks[visits[k].block];
    std::vector<Vec2> segment;
    if (k > 0) {
      segment.push_back(blocks[visits[k - 1].block].center);  // leave the previous block via its center
      segment.insert(segment.end(), visits[k].transit.begin(), visits[k].transit.end());
    }
    const Vec2 prev = segment.empty() ? last : segment.back();
    std::optional<Vec2> next;
    if (k + 1 < visits.size()) {
      next = visits[k + 1].transit.empty() ? blocks[visits[k + 1].block].center : visits[k + 1].transit.front();
    }
    segment.push_back(block.center);
    const auto quarters = order_quarters(block, prev, next);
    segment.insert(segment.end(), quarters.begin(), quarters.end());

    DurationAccumulator trial = acc;
    for (Vec2 p : segment) trial.add(p);
    if (trial.total() > request.time_budget) break;
    acc = trial;
    for (Vec2 p : segment) {
      if (!(p == path.waypoints.back())) path.waypoints.push_back(p);
    }
    last = path.waypoints.back();
    path.visited_blocks.push_back(visits[k].block);
  }
  path.estimated_duration = estimate_duration(path.waypoints, request.v_lin, request.v_ang);
  return path;
}

namespace {

struct Prepared {
  OccupancyGrid grid;
  std::vector<Block> blocks;       // component of the start only
  std::vector<std::size_t> index;  // local -> global block index
  SpanningTree tree;
};

Prepared prepare(const FieldMap& map, double cell_size, int max_edge, Vec2 start) {
  FieldMap m = map;
  m.cell_size = cell_size;
  Prepared p;
  p.grid = rasterize(m);
  const auto all = build_blocks(p.grid, max_edge);
  if (all.empty()) throw DomainError("map has no free cells");
  const auto start_cell = p.grid.cell_of(start);
  if (!start_cell || p.grid.at(*start_cell) != CellState::free)
    throw DomainError("start position lies in an obstacle or outside the grid");
  const BlockGraph graph = block_adjacency(all);
  int comp = -1;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i].covers(*start_cell)) comp = graph.component[i];
  std::vector<std::size_t> local(all.size(), all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (graph.component[i] != comp) continue;
    local[i] = p.blocks.size();
    p.blocks.push_back(all[i]);
    p.index.push_back(i);
  }
  BlockGraph sub;
  sub.vertex_count = p.blocks.size();
  sub.component.assign(sub.vertex_count, 0);
  sub.component_count = 1;
  for (const auto& e : graph.edges)
    if (graph.component[e.u] == comp) sub.edges.push_back({local[e.u], local[e.v], e.weight});
  p.tree = minimum_spanning_tree(sub);
  return p;
}

}  // namespace

CoveragePath plan_coverage(const FieldMap& map, const PlannerConfig& config, double v_lin, double v_ang,
                           Vec2 start) {
  const Prepared p = prepare(map, config.cell_size, config.max_edge, start);
  CoveragePath path = plan_path(p.tree, p.blocks, p.grid, {config.time_budget, v_lin, v_ang, start});
  for (auto& b : path.visited_blocks) b = p.index[b];
  return path;
}

double full_coverage_duration(const FieldMap& map, double cell_size, int max_edge, double v_lin, double v_ang,
                              Vec2 start) {
  const Prepared p = prepare(map, cell_size, max_edge, start);
  const auto path =
      plan_path(p.tree, p.blocks, p.grid, {std::numeric_limits<double>::infinity(), v_lin, v_ang, start});
  return path.estimated_duration;
}

double select_cell_size(const FieldMap& map, std::span<const double> candidates, int max_edge, double time_budget,
                        double v_lin, double v_ang, Vec2 start) {
  std::vector<double> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end());
  std::optional<double> coarsest_valid;
  for (double cs : sorted) {
    double duration = 0.0;
    try {
      duration = full_coverage_duration(map, cs, max_edge, v_lin, v_ang, start);
    } catch (const std::exception&) {
      continue;  // candidate does not fit the map or strands the start
    }
    if (duration <= time_budget) return cs;
    coarsest_valid = cs;
  }
  if (!coarsest_valid) throw ConfigError("no candidate cell size is usable for this map and start");
  return *coarsest_valid;
}

void write_path_csv(const CoveragePath& path, const std::string& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + file + " for writing");
  csv::write_row(out, {"index", "x", "y"});
  for (std::size_t i = 0; i < path.waypoints.size(); ++i)
    csv::write_row(out, {std::to_string(i), csv::format_double(path.waypoints[i].x),
                         csv::format_double(path.waypoints[i].y)});
}

std::vector<Vec2> read_path_csv(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ParseError("cannot open " + file);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file", 1);
  if (csv::split_row(line) != std::vector<std::string>{"index", "x", "y"}) throw ParseError("expected header index,x,y", 1);
  std::vector<Vec2> pts;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = csv::split_row(line);
    if (f.size() != 3) throw ParseError("expected 3 columns", lineno);
    const auto x = csv::parse_double(f[1]);
    const auto y = csv::parse_double(f[2]);
    if (!x || !y) throw ParseError("malformed coordinate", lineno);
    pts.push_back({*x, *y});
  }
  return pts;
}

}  // namespace sparseloc
