#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radiographer/detection.hpp"
#include "radiographer/geometry.hpp"
#include "radiographer/ingest.hpp"

namespace radiographer {

inline constexpr double kRssFloor = -100.0;     // dBm; stands in for links with no data
inline constexpr double kDefaultCellSize = 0.55;  // m

struct CellIndex {
  int col = 0;
  int row = 0;

  // Row-major order.
  friend auto operator<=>(const CellIndex& a, const CellIndex& b) {
    if (auto c = a.row <=> b.row; c != 0) return c;
    return a.col <=> b.col;
  }
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Square-cell tiling of the floor, anchored at the floor corner.
struct Grid {
  Point2D origin;
  double cell_size = kDefaultCellSize;
  int n_cols = 0;
  int n_rows = 0;
  double width = 0.0;   // floor extent covered by the grid
  double height = 0.0;

  std::size_t cell_count() const { return static_cast<std::size_t>(n_cols) * static_cast<std::size_t>(n_rows); }
  std::size_t linear(const CellIndex& c) const { return static_cast<std::size_t>(c.row) * n_cols + c.col; }
  CellIndex cell_at(std::size_t linear_index) const {
    return {static_cast<int>(linear_index % n_cols), static_cast<int>(linear_index / n_cols)};
  }
  Point2D center(const CellIndex& c) const {
    return {origin.x + (c.col + 0.5) * cell_size, origin.y + (c.row + 0.5) * cell_size};
  }

  friend bool operator==(const Grid&, const Grid&) = default;
};

Grid make_grid(double width, double height, double cell_size);
Grid make_grid(const Topology& topology, double cell_size);

/// Half-open cell lookup; points on the floor's far edges clamp to the last cell.
/// Throws std::out_of_range for points off the floor.
CellIndex cell_of(const Grid& grid, const Point2D& p);

/// Per-link values for one epoch in the store's link order; nullopt = no samples.
using EpochVector = std::vector<std::optional<double>>;

struct FingerprintRecord {
  CellIndex cell;
  std::vector<double> mean_rss;
  std::size_t count = 0;                  // accepted epochs folded into this cell
  std::vector<std::size_t> entry_counts;  // epochs that carried data for each link

  friend bool operator==(const FingerprintRecord&, const FingerprintRecord&) = default;
};

enum class UpdateOutcome { stored, discarded_guest, skipped_no_fixes };

/// Grid-keyed store of running-mean RSS vectors.
///
/// Single writer: epochs must be applied in time order. Records are keyed by the
/// row-major linear cell index.
class Fingerprint {
 public:
  Fingerprint(Grid grid, std::vector<std::string> links, DetectorParams params_used);

  const Grid& grid() const { return grid_; }
  const std::vector<std::string>& links() const { return links_; }
  std::size_t link_count() const { return links_.size(); }
  const DetectorParams& params_used() const { return params_; }
  const std::map<std::size_t, FingerprintRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }
  std::size_t stored_epochs() const { return stored_; }
  std::size_t discarded_epochs() const { return discarded_; }

  /// Comparator step: drop the epoch if guests were detected, otherwise fold the
  /// vector into every cell holding a host fix.
  UpdateOutcome update(const EpochVector& rss, std::span<const DeviceBasedFix> fixes, const ActiveLinkSets& sets);

  /// Folds one vector into one cell's running mean, bypassing the comparator.
  void fold(const CellIndex& cell, const EpochVector& rss);

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;

 private:
  friend Fingerprint read_fingerprint(std::istream&, const std::string&);

  Grid grid_;
  std::vector<std::string> links_;
  DetectorParams params_;
  std::map<std::size_t, FingerprintRecord> records_;
  std::size_t stored_ = 0;
  std::size_t discarded_ = 0;
};

void write_fingerprint(std::ostream& out, const Fingerprint& fp);
Fingerprint read_fingerprint(std::istream& in, const std::string& source = "<fingerprint>");
void save_fingerprint(const std::filesystem::path& path, const Fingerprint& fp);
Fingerprint load_fingerprint(const std::filesystem::path& path);

}  // namespace radiographer
