#include "evrate/events.hpp"

#include <algorithm>
#include <string>

namespace evrate {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::out_of_range_event: return "out_of_range_event";
    case Errc::negative_timestamp: return "negative_timestamp";
    case Errc::empty_stream: return "empty_stream";
    case Errc::invalid_roi: return "invalid_roi";
    case Errc::window_too_large: return "window_too_large";
    case Errc::template_deeper_than_area: return "template_deeper_than_area";
    case Errc::no_valid_windows: return "no_valid_windows";
    case Errc::parse_error: return "parse_error";
    case Errc::bad_magic: return "bad_magic";
    case Errc::truncated_file: return "truncated_file";
    case Errc::count_mismatch: return "count_mismatch";
    case Errc::unsorted_input: return "unsorted_input";
    case Errc::invalid_spec: return "invalid_spec";
    case Errc::no_estimate: return "no_estimate";
    case Errc::io_error: return "io_error";
  }
  return "unknown";
}

EventStream validate_stream(std::vector<Event> events, uint16_t width, uint16_t height) {
  for (size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (e.t < 0) {
      throw Error(Errc::negative_timestamp,
                  "event " + std::to_string(i) + " has negative timestamp", static_cast<long long>(i));
    }
    if (e.x >= width || e.y >= height) {
      throw Error(Errc::out_of_range_event,
                  "event " + std::to_string(i) + " at (" + std::to_string(e.x) + "," +
                      std::to_string(e.y) + ") outside " + std::to_string(width) + "x" +
                      std::to_string(height),
                  static_cast<long long>(i));
    }
  }
  if (!std::is_sorted(events.begin(), events.end(),
                      [](const Event& a, const Event& b) { return a.t < b.t; })) {
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
  }
  EventStream stream;
  stream.width = width;
  stream.height = height;
  stream.duration_us = events.empty() ? 0 : events.back().t + 1;
  stream.events = std::move(events);
  return stream;
}

int VoxelGrid::value_at(int x, int y, int bin) const {
  const auto col = column(x, y);
  auto it = std::lower_bound(col.begin(), col.end(), static_cast<uint32_t>(bin),
                             [](const Cell& c, uint32_t b) { return c.bin < b; });
  if (it != col.end() && it->bin == static_cast<uint32_t>(bin)) return it->value;
  return 0;
}

VoxelGrid VoxelGrid::from_dense(int width, int height, int depth, int64_t t_quant_us,
                                std::span<const int8_t> values) {
  if (values.size() != static_cast<size_t>(width) * height * depth) {
    throw Error(Errc::invalid_spec, "dense cell array does not match grid dimensions");
  }
  VoxelGrid grid;
  grid.width_ = width;
  grid.height_ = height;
  grid.depth_ = depth;
  grid.t_quant_us_ = t_quant_us;
  grid.offsets_.assign(static_cast<size_t>(width) * height + 1, 0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const size_t p = static_cast<size_t>(y) * width + x;
      const int8_t* col = values.data() + p * depth;
      for (int k = 0; k < depth; ++k) {
        if (col[k] != 0) grid.cells_.push_back({static_cast<uint32_t>(k), col[k]});
      }
      grid.offsets_[p + 1] = grid.cells_.size();
    }
  }
  return grid;
}

VoxelGrid quantize(const EventStream& stream, int64_t t_quant_us, std::optional<Roi> roi) {
  if (t_quant_us < 1) throw Error(Errc::invalid_spec, "t_quant_us must be >= 1");

  Roi r{0, 0, stream.width, stream.height};
  if (roi) {
    r = *roi;
    if (r.width < 1 || r.height < 1 || r.x < 0 || r.y < 0 || r.x + r.width > stream.width ||
        r.y + r.height > stream.height) {
      throw Error(Errc::invalid_roi, "roi does not fit inside the sensor");
    }
  }

  VoxelGrid grid;
  grid.width_ = r.width;
  grid.height_ = r.height;
  grid.t_quant_us_ = t_quant_us;
  const int64_t depth64 = stream.duration_us == 0
                              ? 0
                              : (stream.duration_us + t_quant_us - 1) / t_quant_us;
  if (depth64 > INT32_MAX) {
    throw Error(Errc::invalid_spec, "grid depth exceeds int32 range; raise t_quant_us");
  }
  grid.depth_ = static_cast<int>(depth64);

  const size_t npix = static_cast<size_t>(r.width) * r.height;
  const auto pixel_of = [&](const Event& e) -> size_t {
    return static_cast<size_t>(e.y - r.y) * r.width + (e.x - r.x);
  };
  const auto inside = [&](const Event& e) {
    return e.x >= r.x && e.x < r.x + r.width && e.y >= r.y && e.y < r.y + r.height;
  };

  // Two passes over the (time-sorted) events. Per pixel, bins arrive
  // non-decreasing, so runs of the same bin collapse with last-value-wins.
  std::vector<int64_t> last_bin(npix, -1);
  std::vector<size_t> counts(npix, 0);
  size_t kept = 0;
  for (const Event& e : stream.events) {
    if (!inside(e)) continue;
    ++kept;
    const size_t p = pixel_of(e);
    const int64_t bin = e.t / t_quant_us;
    if (bin != last_bin[p]) {
      ++counts[p];
      last_bin[p] = bin;
    }
  }
  if (kept == 0) throw Error(Errc::empty_stream, "no events inside the requested region");

  grid.offsets_.assign(npix + 1, 0);
  for (size_t p = 0; p < npix; ++p) grid.offsets_[p + 1] = grid.offsets_[p] + counts[p];
  grid.cells_.resize(grid.offsets_[npix]);

  std::fill(last_bin.begin(), last_bin.end(), -1);
  std::vector<size_t> cursor(grid.offsets_.begin(), grid.offsets_.end() - 1);
  for (const Event& e : stream.events) {
    if (!inside(e)) continue;
    const size_t p = pixel_of(e);
    const auto bin = static_cast<uint32_t>(e.t / t_quant_us);
    const int8_t value = e.polarity ? 1 : -1;
    if (static_cast<int64_t>(bin) != last_bin[p]) {
      grid.cells_[cursor[p]++] = {bin, value};
      last_bin[p] = bin;
    } else {
      grid.cells_[cursor[p] - 1].value = value;  // last event in the bin wins
    }
  }
  return grid;
}

std::vector<AreaRef> split_windows(const VoxelGrid& grid, int window_px) {
  if (window_px < 1) throw Error(Errc::invalid_spec, "window size must be >= 1");
  const int nx = grid.width() / window_px;
  const int ny = grid.height() / window_px;
  if (nx == 0 || ny == 0) {
    throw Error(Errc::window_too_large,
                "window " + std::to_string(window_px) + "px does not fit a " +
                    std::to_string(grid.width()) + "x" + std::to_string(grid.height()) + " grid");
  }
  std::vector<AreaRef> areas;
  areas.reserve(static_cast<size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      areas.push_back({static_cast<int>(areas.size()), i * window_px, j * window_px, window_px});
    }
  }
  return areas;
}

}  // namespace evrate
