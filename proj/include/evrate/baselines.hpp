#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "evrate/events.hpp"

namespace evrate {

/// Per-window results of the per-pixel temporal-median method.
struct SimpleBaselineResult {
  double rate_hz = 0;    // median of the per-window rates
  double period_us = 0;  // 1e6 / rate_hz
  std::vector<int> window_indices;   // windows that produced an estimate
  std::vector<double> window_rates;  // Hz, parallel to window_indices
};

/// Per pixel and polarity, the median of consecutive inter-event times; per
/// window, the median of those results gives a period, converted to Hz; the
/// aggregate is the median over windows. All medians take the lower middle
/// element for even counts. Throws Error{empty_stream} / Error{no_estimate}.
SimpleBaselineResult simple_baseline(const EventStream& stream, int window_px = 45,
                                     std::optional<Roi> roi = std::nullopt);

/// 2D array of per-pixel rate estimates in Hz; NaN marks pixels without one.
struct RateMap {
  int width = 0;
  int height = 0;
  std::vector<double> rates;

  double at(int x, int y) const { return rates[static_cast<size_t>(y) * width + x]; }
  static bool has_estimate(double v) { return !std::isnan(v); }
};

struct FftBaselineConfig {
  bool negative_polarity = true;  // which polarity's timestamps to use
  int64_t bin_us = 100;           // impulse-train sampling bin
  int n_fft = 0;                  // 0 = next power of two >= duration / bin_us
};

struct FftBaselineResult {
  double rate_hz = 0;
  RateMap map;       // after 3x3 median filtering
  int n_fft = 0;
  double bin_hz = 0;  // DFT grid spacing, 1e6 / (bin_us * n_fft)
};

/// Per pixel of the chosen polarity: event times become unit impulses on a
/// bin_us grid, a Hann window is applied and the signal transformed; the
/// pixel's rate is the largest non-DC magnitude bin (ties to the lower
/// frequency). The rate map is median-filtered in 3x3 neighborhoods
/// (skipping pixels without estimates) and the mode of the filtered rates is
/// returned. Throws Error{empty_stream} / Error{no_estimate} /
/// Error{invalid_spec} for n_fft < 2 or bin_us < 1.
FftBaselineResult fft_baseline(const EventStream& stream, const FftBaselineConfig& config = {},
                               std::optional<Roi> roi = std::nullopt);

}  // namespace evrate
