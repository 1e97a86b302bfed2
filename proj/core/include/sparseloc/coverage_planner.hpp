#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sparseloc/geometry.hpp"

namespace sparseloc {

/// Field geometry to be covered: outer bounds plus polygonal obstacles.
struct FieldMap {
  Rect bounds;
  std::vector<Polygon> obstacles;
  double cell_size = 1.0;

  /// Throws ConfigError when bounds are empty, an obstacle is not simple or
  /// leaves the bounds, or the cell size does not fit inside the bounds.
  void validate() const;
};

enum class CellState : std::uint8_t { free, obstacle };

struct CellIndex {
  int x = 0;
  int y = 0;
  friend constexpr bool operator==(CellIndex, CellIndex) = default;
};

class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(int width, int height, Vec2 origin, double cell_size);

  int width() const { return width_; }
  int height() const { return height_; }
  Vec2 origin() const { return origin_; }
  double cell_size() const { return cell_size_; }
  std::size_t cell_count() const { return cells_.size(); }

  bool in_range(CellIndex c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  CellState at(CellIndex c) const { return cells_[index(c)]; }
  void set(CellIndex c, CellState s) { cells_[index(c)] = s; }
  bool is_free(CellIndex c) const { return in_range(c) && at(c) == CellState::free; }
  std::size_t free_count() const;

  Vec2 cell_center(CellIndex c) const;
  /// Cell containing `p`, or nullopt outside the grid. Points on an internal
  /// cell border belong to the cell with the larger index.
  std::optional<CellIndex> cell_of(Vec2 p) const;

 private:
  std::size_t index(CellIndex c) const { return static_cast<std::size_t>(c.y) * width_ + c.x; }

  int width_ = 0;
  int height_ = 0;
  Vec2 origin_;
  double cell_size_ = 1.0;
  std::vector<CellState> cells_;
};

/// Square group of free cells. `edge` is in cells.
struct Block {
  CellIndex anchor;
  int edge = 1;
  Vec2 center;
  double edge_m = 0.0;

  bool covers(CellIndex c) const {
    return c.x >= anchor.x && c.y >= anchor.y && c.x < anchor.x + edge && c.y < anchor.y + edge;
  }
  Rect extent() const;
  /// Centers of the four quadrants, counter-clockwise from the lower-left one.
  std::vector<Vec2> quarter_centers() const;
};

struct WeightedEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  double weight = 0.0;
};

/// Undirected graph over blocks. `component[i]` labels the connected region of vertex i.
struct BlockGraph {
  std::size_t vertex_count = 0;
  std::vector<WeightedEdge> edges;
  std::vector<int> component;
  int component_count = 0;

  bool connected() const { return component_count <= 1; }
};

struct SpanningTree {
  std::size_t vertex_count = 0;
  std::vector<WeightedEdge> edges;
  double total_weight = 0.0;

  std::vector<std::vector<std::size_t>> adjacency() const;
};

struct CoveragePath {
  std::vector<Vec2> waypoints;
  double estimated_duration = 0.0;
  double time_budget = 0.0;
  /// Blocks fully visited, in traversal order.
  std::vector<std::size_t> visited_blocks;
};

struct PlanRequest {
  double time_budget = 0.0;
  double v_lin = 0.8;
  double v_ang = 0.75;
  Vec2 start;
};

/// Marks each cell obstacle when its center lies in an obstacle polygon (even-odd,
/// boundary inclusive) or outside the bounds, using a per-row scanline fill.
/// The grid holds floor(extent / cell_size) cells per axis, centred in the bounds.
OccupancyGrid rasterize(const FieldMap& map);

/// Greedy block cover: for edge = max_edge, max_edge/2, ..., 1 the grid is scanned
/// row-major and every all-free, still-unclaimed square of that edge becomes a block.
std::vector<Block> build_blocks(const OccupancyGrid& grid, int max_edge);

/// Edges between blocks sharing a boundary segment of positive length, weighted by
/// center distance. Disconnected free space yields one component label per region.
BlockGraph block_adjacency(std::span<const Block> blocks);

/// Kruskal with (weight, u, v) ordering. Throws DomainError naming the components
/// when the graph is disconnected.
SpanningTree minimum_spanning_tree(const BlockGraph& graph);

/// Depth-first coverage over the tree. Each visited block contributes its center
/// and its four quarter-centers; moves between blocks follow tree edges through
/// block centers. Stops before the first block that would overrun the budget.
CoveragePath plan_path(const SpanningTree& tree, std::span<const Block> blocks, const OccupancyGrid& grid,
                       const PlanRequest& request);

/// Rotate-then-drive traversal time: segment length / v_lin plus heading change / v_ang
/// at each interior waypoint. Zero-length segments are skipped.
double estimate_duration(std::span<const Vec2> waypoints, double v_lin, double v_ang);

struct PlannerConfig {
  double cell_size = 1.0;
  int max_edge = 4;
  double time_budget = 480.0;
};

/// rasterize -> build_blocks -> block_adjacency -> minimum_spanning_tree -> plan_path.
/// When the free space is disconnected only the region containing the start is planned.
CoveragePath plan_coverage(const FieldMap& map, const PlannerConfig& config, double v_lin, double v_ang,
                           Vec2 start);

/// Duration of the untruncated plan (every reachable block visited).
double full_coverage_duration(const FieldMap& map, double cell_size, int max_edge, double v_lin, double v_ang,
                              Vec2 start);

/// Finest candidate cell size whose full coverage fits in `time_budget`; the
/// coarsest candidate when none fits.
double select_cell_size(const FieldMap& map, std::span<const double> candidates, int max_edge,
                        double time_budget, double v_lin, double v_ang, Vec2 start);

void write_path_csv(const CoveragePath& path, const std::string& file);
/// Reads the waypoints back; duration and budget are not stored in the CSV.
std::vector<Vec2> read_path_csv(const std::string& file);

}  // namespace sparseloc
