#pragma once

#include <optional>
#include <span>
#include <vector>

#include "evrate/events.hpp"

namespace evrate {

/// Peak detector settings. Prominence is topographic and thresholded as a
/// fraction of the full response range.
struct PeakParams {
  double min_prominence = 0.3;
  int min_separation_bins = 2;
};

enum class CorrelationMethod {
  automatic,  // pick per window from a cost estimate
  direct,     // sparse lag accumulation, integer-exact
  fft,        // per-pixel FFT correlation pooled in the frequency domain
};

struct EstimateConfig {
  int window_px = 45;
  int64_t template_events = 1800;
  int64_t t_quant_us = 100;
  PeakParams peaks{};
  double max_template_fraction = 0.25;
  CorrelationMethod method = CorrelationMethod::automatic;
  int threads = 1;
};

/// Leading time-slab of one window, deep enough to cover template_events
/// raw events. Cells are stored per local pixel, column-compressed like the
/// grid they were copied from.
struct CorrelationTemplate {
  int area_index = 0;
  int x0 = 0;
  int y0 = 0;
  int size = 0;        // window side, pixels
  int depth_bins = 0;  // d
  int64_t event_count = 0;
  std::vector<size_t> col_offsets;       // size*size + 1
  std::vector<VoxelGrid::Cell> cells;

  std::span<const VoxelGrid::Cell> column(int lx, int ly) const {
    const size_t p = static_cast<size_t>(ly) * size + lx;
    return {cells.data() + col_offsets[p], cells.data() + col_offsets[p + 1]};
  }
};

enum class WindowStatus {
  accepted,
  empty_window,         // no events at all
  insufficient_events,  // threshold unreachable within the depth cap
  too_few_peaks,        // fewer than two correlation peaks
};

const char* window_status_name(WindowStatus status) noexcept;

struct TemplateSelection {
  WindowStatus status = WindowStatus::empty_window;
  std::optional<CorrelationTemplate> tmpl;
};

/// Correlation score per time lag for one window; offsets run 0 .. D - d.
struct ResponseSeries {
  int area_index = 0;
  std::vector<double> scores;
};

struct WindowEstimate {
  int area_index = -1;
  WindowStatus status = WindowStatus::empty_window;
  std::vector<int> peak_offsets;
  double period_us = 0;  // median of consecutive peak deltas, x t_quant
  int template_depth_bins = 0;
  int64_t template_event_count = 0;
};

struct StageTimings {
  double quantize_ms = 0;
  double windows_ms = 0;  // the parallel per-window stage
  double total_ms = 0;
};

struct RateEstimate {
  double rate_hz = 0;
  double period_us = 0;
  int accepted_windows = 0;
  std::vector<WindowEstimate> windows;
  EstimateConfig config;
  StageTimings timings;
};

/// Picks the smallest depth d whose cumulative raw-event count inside the
/// window reaches n_events, and copies the grid's leading d bins of the
/// window. Rejects the window when the threshold is unreachable within
/// max_fraction of the grid depth.
TemplateSelection select_template(const VoxelGrid& grid, const AreaRef& area,
                                  std::span<const int64_t> events_per_bin, int64_t n_events,
                                  double max_fraction);

/// score(tau) = sum over (x, y, k) of area[x, y, tau + k] * template[x, y, k]
/// for tau in [0, D - d]. The FFT path matches the direct definition to
/// floating-point accuracy. With normalize set, scores are min-max rescaled
/// to [0, 1] (a constant series maps to all zeros).
ResponseSeries correlate_time(const VoxelGrid& grid, const AreaRef& area,
                              const CorrelationTemplate& tmpl, bool normalize = false,
                              CorrelationMethod method = CorrelationMethod::automatic);

/// Local maxima filtered by topographic prominence (>= min_prominence of the
/// series range) and pairwise separation (>= min_separation_bins, keeping
/// higher peaks first). Returns strictly increasing offsets.
std::vector<int> detect_peaks(std::span<const double> scores, const PeakParams& params);

/// Median of consecutive peak deltas (lower middle for even counts, keeping
/// the period an exact bin multiple), scaled to microseconds. Fewer than two
/// peaks rejects the window.
WindowEstimate window_period(int area_index, std::vector<int> peak_offsets, int64_t t_quant_us);

/// Median of accepted windows' periods (mean of the two middles for even
/// counts) and the corresponding rate in Hz. Throws
/// Error{no_valid_windows} when nothing was accepted.
RateEstimate aggregate_windows(std::vector<WindowEstimate> windows, const EstimateConfig& config);

/// Full pipeline: quantize, split into windows, per window select a
/// template, correlate along time, detect peaks and derive a period, then
/// aggregate the per-window periods. Windows run in parallel when
/// config.threads > 1.
RateEstimate estimate(const EventStream& stream, const EstimateConfig& config = {},
                      std::optional<Roi> roi = std::nullopt);

}  // namespace evrate
