#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sparseloc/geometry.hpp"
#include "sparseloc/simulator.hpp"

namespace sparseloc {

struct Estimate {
  std::string method;
  Vec2 position;
  double score = 0.0;            // the deciding statistic, dBm
  std::optional<double> error;   // meters, when the true source is known
};

/// Per-tile mean RSSI over an a x a tiling anchored at the bounds' lower-left corner.
class TileGrid {
 public:
  TileGrid(double tile_edge, Rect bounds);

  double tile_edge() const { return tile_edge_; }
  Vec2 origin() const { return bounds_.min; }
  const Rect& bounds() const { return bounds_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }

  std::size_t count(int i, int j) const { return counts_[index(i, j)]; }
  /// Empty when no sample fell in the tile.
  std::optional<double> mean(int i, int j) const;
  /// Center of the tile's overlap with the bounds (edge tiles may be partial).
  Vec2 tile_center(int i, int j) const;
  /// Tile containing `p`; the upper bound edge folds into the last tile.
  std::pair<int, int> tile_of(Vec2 p) const;

  void add(Vec2 p, double rssi);

  /// Row-major matrix, row j = tile row j (south to north), `nan` where empty.
  void write_csv(std::ostream& out) const;

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }

  double tile_edge_;
  Rect bounds_;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> sums_;
  std::vector<std::size_t> counts_;
};

/// Groups samples into tiles and averages their RSSI. Samples outside `bounds`
/// raise DomainError.
TileGrid assign_tiles(std::span<const Sample> samples, double tile_edge, Rect bounds);

/// Center of the non-empty tile with the largest mean; ties go to the lowest i,
/// then the lowest j. Method label is `tile_<a>x`.
Estimate estimate_tile_argmax(const TileGrid& grid);

/// Position of the strongest sample; the earliest wins ties.
Estimate estimate_peak_rssi(std::span<const Sample> samples);

/// Label used for a tile estimator, e.g. "tile_1x" for a = 1 m.
std::string tile_method_label(double tile_edge);

}  // namespace sparseloc
