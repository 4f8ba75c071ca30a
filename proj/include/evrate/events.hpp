#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "evrate/error.hpp"

namespace evrate {

/// A single brightness-change report. Timestamps are microseconds since
/// stream start; polarity true means the pixel got brighter.
struct Event {
  int64_t t = 0;
  uint16_t x = 0;
  uint16_t y = 0;
  bool polarity = false;

  friend bool operator==(const Event&, const Event&) = default;
};

struct Roi {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

/// Events sorted non-decreasing by t, with sensor geometry attached.
/// duration_us is at least (last timestamp + 1); 0 for an empty stream.
struct EventStream {
  std::vector<Event> events;
  uint16_t width = 0;
  uint16_t height = 0;
  int64_t duration_us = 0;

  bool empty() const noexcept { return events.empty(); }
  size_t size() const noexcept { return events.size(); }
};

/// Sorts events by timestamp (stable, so capture order breaks ties) and
/// checks coordinates against the sensor geometry.
/// Throws Error{out_of_range_event} or Error{negative_timestamp} with the
/// offending input index.
EventStream validate_stream(std::vector<Event> events, uint16_t width, uint16_t height);

/// Ternary voxel grid over (x, y, time bin). Cells hold the polarity of the
/// last event that fell into the bin (+1/-1), 0 where no event fell.
/// Stored column-compressed: per pixel, a sorted run of nonzero bins. This
/// keeps full-sensor second-long grids (billions of cells, thousandths
/// nonzero) in tens of megabytes while exposing per-cell semantics.
class VoxelGrid {
public:
  struct Cell {
    uint32_t bin;
    int8_t value;  // +1 or -1
  };

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int depth() const noexcept { return depth_; }
  int64_t t_quant_us() const noexcept { return t_quant_us_; }

  /// Nonzero cells of one pixel column, sorted by bin.
  std::span<const Cell> column(int x, int y) const {
    const size_t p = static_cast<size_t>(y) * width_ + x;
    return {cells_.data() + offsets_[p], cells_.data() + offsets_[p + 1]};
  }

  /// Semantic cell accessor: +1, -1 or 0. O(log column length).
  int value_at(int x, int y, int bin) const;

  size_t nonzero_count() const noexcept { return cells_.size(); }

  /// Builds a grid from a dense row-major array laid out [y][x][bin].
  /// Intended for tests and small tools; values must be in {-1, 0, +1}.
  static VoxelGrid from_dense(int width, int height, int depth, int64_t t_quant_us,
                              std::span<const int8_t> values);

private:
  friend VoxelGrid quantize(const EventStream&, int64_t, std::optional<Roi>);

  int width_ = 0;
  int height_ = 0;
  int depth_ = 0;
  int64_t t_quant_us_ = 1;
  std::vector<size_t> offsets_;  // width*height + 1
  std::vector<Cell> cells_;
};

/// Buckets events into bins of t_quant_us microseconds, keeping the last
/// event's polarity per (pixel, bin). With a roi, events outside it are
/// dropped and grid coordinates are shifted to the roi origin.
/// Throws Error{empty_stream} when no event lands inside, Error{invalid_roi}
/// for a roi that does not fit the sensor.
VoxelGrid quantize(const EventStream& stream, int64_t t_quant_us,
                   std::optional<Roi> roi = std::nullopt);

/// One spatial window of a grid.
struct AreaRef {
  int index = 0;
  int x0 = 0;
  int y0 = 0;
  int size = 0;  // window side, pixels
};

/// Partitions the grid into floor(width/W) x floor(height/W) non-overlapping
/// W x W windows anchored at the origin. Residual margins narrower than W
/// are dropped. Throws Error{window_too_large} when no window fits.
std::vector<AreaRef> split_windows(const VoxelGrid& grid, int window_px);

}  // namespace evrate
