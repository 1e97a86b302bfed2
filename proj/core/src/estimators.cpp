#include "sparseloc/estimators.hpp"

#include <cmath>
#include <limits>

#include "sparseloc/csv.hpp"
#include "sparseloc/errors.hpp"

namespace sparseloc {

TileGrid::TileGrid(double tile_edge, Rect bounds) : tile_edge_(tile_edge), bounds_(bounds) {
  if (!(tile_edge > 0.0)) throw DomainError("tile_edge must be > 0");
  if (!(bounds.width() > 0.0) || !(bounds.height() > 0.0)) throw DomainError("tile bounds must have positive area");
  nx_ = std::max(1, static_cast<int>(std::ceil(bounds.width() / tile_edge - 1e-9)));
  ny_ = std::max(1, static_cast<int>(std::ceil(bounds.height() / tile_edge - 1e-9)));
  sums_.assign(static_cast<std::size_t>(nx_) * ny_, 0.0);
  counts_.assign(sums_.size(), 0);
}

std::optional<double> TileGrid::mean(int i, int j) const {
  const auto k = index(i, j);
  if (counts_[k] == 0) return std::nullopt;
  return sums_[k] / static_cast<double>(counts_[k]);
}

Vec2 TileGrid::tile_center(int i, int j) const {
  const double x0 = bounds_.min.x + i * tile_edge_;
  const double y0 = bounds_.min.y + j * tile_edge_;
  const double x1 = std::min(x0 + tile_edge_, bounds_.max.x);
  const double y1 = std::min(y0 + tile_edge_, bounds_.max.y);
  return {0.5 * (x0 + x1), 0.5 * (y0 + y1)};
}

std::pair<int, int> TileGrid::tile_of(Vec2 p) const {
  const int i = std::clamp(static_cast<int>(std::floor((p.x - bounds_.min.x) / tile_edge_)), 0, nx_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor((p.y - bounds_.min.y) / tile_edge_)), 0, ny_ - 1);
  return {i, j};
}

void TileGrid::add(Vec2 p, double rssi) {
  const auto [i, j] = tile_of(p);
  sums_[index(i, j)] += rssi;
  ++counts_[index(i, j)];
}

void TileGrid::write_csv(std::ostream& out) const {
  csv::Matrix m;
  m.rows = static_cast<std::size_t>(ny_);
  m.cols = static_cast<std::size_t>(nx_);
  m.values.reserve(m.rows * m.cols);
  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i < nx_; ++i) m.values.push_back(mean(i, j).value_or(std::nan("")));
  csv::write_matrix(out, m);
}

TileGrid assign_tiles(std::span<const Sample> samples, double tile_edge, Rect bounds) {
  TileGrid grid(tile_edge, bounds);
  for (const auto& s : samples) {
    if (!bounds.contains(s.position()))
      throw DomainError("sample at (" + csv::format_double(s.x) + ", " + csv::format_double(s.y) +
                        ") lies outside the tile bounds");
    grid.add(s.position(), s.rssi);
  }
  return grid;
}

std::string tile_method_label(double tile_edge) {
  return "tile_" + csv::format_double(tile_edge) + "x";
}

Estimate estimate_tile_argmax(const TileGrid& grid) {
  std::optional<std::pair<int, int>> best;
  double best_mean = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.nx(); ++i) {
    for (int j = 0; j < grid.ny(); ++j) {
      const auto m = grid.mean(i, j);
      if (m && (!best || *m > best_mean)) {
        best_mean = *m;
        best = {i, j};
      }
    }
  }
  if (!best) throw EstimationError("every tile is empty");
  return {tile_method_label(grid.tile_edge()), grid.tile_center(best->first, best->second), best_mean, std::nullopt};
}

Estimate estimate_peak_rssi(std::span<const Sample> samples) {
  if (samples.empty()) throw EstimationError("peak RSSI needs at least one sample");
  std::size_t best = 0;
  for (std::size_t k = 1; k < samples.size(); ++k)
    if (samples[k].rssi > samples[best].rssi) best = k;
  return {"peak_rssi", samples[best].position(), samples[best].rssi, std::nullopt};
}

}  // namespace sparseloc
