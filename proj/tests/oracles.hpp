// Independent reference implementations used to pin expected values. These
// deliberately use plain loops over the dense semantic view, not the
// library's sparse/FFT paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <vector>

#include "evrate/estimate.hpp"
#include "evrate/events.hpp"

namespace oracles {

// score(tau) = sum over x, y, k of area[x, y, tau + k] * template[x, y, k],
// as a literal triple sum through the per-cell accessor.
inline std::vector<double> correlate_brute_force(const evrate::VoxelGrid& grid,
                                                 const evrate::AreaRef& area,
                                                 const evrate::CorrelationTemplate& tmpl) {
  const int depth = grid.depth();
  const int d = tmpl.depth_bins;
  std::vector<double> scores(static_cast<size_t>(depth - d) + 1, 0.0);
  for (size_t tau = 0; tau < scores.size(); ++tau) {
    double acc = 0;
    for (int ly = 0; ly < area.size; ++ly) {
      for (int lx = 0; lx < area.size; ++lx) {
        for (int k = 0; k < d; ++k) {
          int tv = 0;
          for (const auto& c : tmpl.column(lx, ly)) {
            if (c.bin == static_cast<uint32_t>(k)) {
              tv = c.value;
              break;
            }
          }
          if (tv == 0) continue;
          acc += tv * grid.value_at(area.x0 + lx, area.y0 + ly, static_cast<int>(tau) + k);
        }
      }
    }
    scores[tau] = acc;
  }
  return scores;
}

// Full-grid autocorrelation over positive lags, dense quadruple loop.
inline std::vector<double> autocorrelate_brute_force(const evrate::VoxelGrid& grid, int max_lag) {
  std::vector<double> scores(static_cast<size_t>(max_lag) + 1, 0.0);
  for (int lag = 0; lag <= max_lag; ++lag) {
    double acc = 0;
    for (int y = 0; y < grid.height(); ++y) {
      for (int x = 0; x < grid.width(); ++x) {
        for (const auto& c : grid.column(x, y)) {
          const int other = static_cast<int>(c.bin) + lag;
          if (other < grid.depth()) acc += c.value * grid.value_at(x, y, other);
        }
      }
    }
    scores[lag] = acc;
  }
  return scores;
}

// Quadratic-time topographic prominence of one local maximum.
inline double prominence_brute_force(const std::vector<double>& s, int peak) {
  const double h = s[peak];
  double left_base = h;
  {
    double run_min = h;
    for (int j = peak - 1; j >= 0; --j) {
      if (s[j] > h) break;
      run_min = std::min(run_min, s[j]);
    }
    left_base = run_min;
  }
  double right_base = h;
  {
    double run_min = h;
    for (size_t j = peak + 1; j < s.size(); ++j) {
      if (s[j] > h) break;
      run_min = std::min(run_min, s[j]);
    }
    right_base = run_min;
  }
  return h - std::max(left_base, right_base);
}

inline int64_t median_lower_int(std::vector<int64_t> v) {
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

inline double median_lower_double(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

// Simple-baseline reference: explicit per-pixel/per-polarity loops, sorted
// maps, no shared code with the library.
inline double simple_baseline_brute_force(const std::vector<evrate::Event>& events, int width,
                                          int height, int window_px) {
  std::map<std::tuple<int, int, int>, std::vector<int64_t>> stamps;
  for (const auto& e : events) stamps[{e.x, e.y, e.polarity ? 1 : 0}].push_back(e.t);
  for (auto& [_, ts] : stamps) std::sort(ts.begin(), ts.end());

  const int nx = width / window_px;
  const int ny = height / window_px;
  std::vector<double> window_rates;
  for (int wy = 0; wy < ny; ++wy) {
    for (int wx = 0; wx < nx; ++wx) {
      std::vector<int64_t> temporal;
      for (const auto& [key, ts] : stamps) {
        const auto [x, y, _pol] = key;
        if (x / window_px != wx || y / window_px != wy) continue;
        if (x / window_px >= nx || y / window_px >= ny) continue;
        if (ts.size() < 2) continue;
        std::vector<int64_t> deltas;
        for (size_t i = 1; i < ts.size(); ++i) deltas.push_back(ts[i] - ts[i - 1]);
        temporal.push_back(median_lower_int(deltas));
      }
      if (temporal.empty()) continue;
      const int64_t period = median_lower_int(temporal);
      if (period > 0) window_rates.push_back(1e6 / static_cast<double>(period));
    }
  }
  if (window_rates.empty()) return std::nan("");
  return median_lower_double(window_rates);
}

// |X[k]| of the windowed impulse train, direct O(n^2) DFT at one bin.
inline double dft_magnitude_at(const std::vector<double>& signal, size_t n_fft, size_t k) {
  std::complex<double> acc{0.0, 0.0};
  for (size_t m = 0; m < signal.size() && m < n_fft; ++m) {
    if (signal[m] == 0.0) continue;
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) *
                         static_cast<double>(m) / static_cast<double>(n_fft);
    acc += signal[m] * std::complex<double>(std::cos(angle), std::sin(angle));
  }
  return std::abs(acc);
}

}  // namespace oracles
