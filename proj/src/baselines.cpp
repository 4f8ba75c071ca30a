#include "evrate/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "fft.hpp"

namespace evrate {

namespace {

constexpr double kNoEstimate = std::numeric_limits<double>::quiet_NaN();

Roi effective_roi(const EventStream& stream, const std::optional<Roi>& roi) {
  Roi r{0, 0, stream.width, stream.height};
  if (roi) {
    r = *roi;
    if (r.width < 1 || r.height < 1 || r.x < 0 || r.y < 0 || r.x + r.width > stream.width ||
        r.y + r.height > stream.height) {
      throw Error(Errc::invalid_roi, "roi does not fit inside the sensor");
    }
  }
  return r;
}

// Lower middle element; keeps integer-valued medians integer.
template <typename T>
T median_lower(std::vector<T>& v) {
  const size_t mid = (v.size() - 1) / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  return v[mid];
}

}  // namespace

SimpleBaselineResult simple_baseline(const EventStream& stream, int window_px,
                                     std::optional<Roi> roi) {
  if (stream.empty()) throw Error(Errc::empty_stream, "event stream is empty");
  if (window_px < 1) throw Error(Errc::invalid_spec, "window size must be >= 1");
  const Roi r = effective_roi(stream, roi);

  // Timestamp lists per (pixel, polarity); events are already time-sorted.
  const size_t npix = static_cast<size_t>(r.width) * r.height;
  std::vector<std::vector<int64_t>> stamps(npix * 2);
  for (const Event& e : stream.events) {
    if (e.x < r.x || e.x >= r.x + r.width || e.y < r.y || e.y >= r.y + r.height) continue;
    const size_t p = static_cast<size_t>(e.y - r.y) * r.width + (e.x - r.x);
    stamps[p * 2 + (e.polarity ? 1 : 0)].push_back(e.t);
  }

  const int nx = r.width / window_px;
  const int ny = r.height / window_px;
  if (nx == 0 || ny == 0) {
    throw Error(Errc::window_too_large, "window does not fit inside the region");
  }

  SimpleBaselineResult result;
  std::vector<int64_t> deltas;
  std::vector<int64_t> temporal;
  for (int wy = 0; wy < ny; ++wy) {
    for (int wx = 0; wx < nx; ++wx) {
      temporal.clear();
      for (int y = wy * window_px; y < (wy + 1) * window_px; ++y) {
        for (int x = wx * window_px; x < (wx + 1) * window_px; ++x) {
          const size_t p = static_cast<size_t>(y) * r.width + x;
          for (int pol = 0; pol < 2; ++pol) {
            const auto& ts = stamps[p * 2 + pol];
            if (ts.size() < 2) continue;
            deltas.clear();
            for (size_t i = 1; i < ts.size(); ++i) deltas.push_back(ts[i] - ts[i - 1]);
            temporal.push_back(median_lower(deltas));
          }
        }
      }
      if (temporal.empty()) continue;
      const int64_t period = median_lower(temporal);
      if (period <= 0) continue;  // duplicate timestamps collapse to zero deltas
      result.window_indices.push_back(wy * nx + wx);
      result.window_rates.push_back(1e6 / static_cast<double>(period));
    }
  }
  if (result.window_rates.empty()) {
    throw Error(Errc::no_estimate, "no pixel produced two events of one polarity");
  }
  std::vector<double> rates = result.window_rates;
  result.rate_hz = median_lower(rates);
  result.period_us = 1e6 / result.rate_hz;
  return result;
}

FftBaselineResult fft_baseline(const EventStream& stream, const FftBaselineConfig& config,
                               std::optional<Roi> roi) {
  if (stream.empty()) throw Error(Errc::empty_stream, "event stream is empty");
  if (config.bin_us < 1) throw Error(Errc::invalid_spec, "bin_us must be >= 1");
  if (config.n_fft != 0 && config.n_fft < 2) throw Error(Errc::invalid_spec, "n_fft must be >= 2");
  const Roi r = effective_roi(stream, roi);

  const int64_t n_samples64 = (stream.duration_us + config.bin_us - 1) / config.bin_us;
  size_t n_fft = config.n_fft > 0 ? static_cast<size_t>(config.n_fft)
                                  : detail::RealFft::next_pow2(static_cast<size_t>(
                                        std::max<int64_t>(n_samples64, 2)));
  if (n_fft > (1u << 26)) throw Error(Errc::invalid_spec, "n_fft too large");
  const size_t n_samples = std::min<size_t>(static_cast<size_t>(n_samples64), n_fft);

  // Impulse bins per pixel, selected polarity only.
  const size_t npix = static_cast<size_t>(r.width) * r.height;
  std::vector<std::vector<uint32_t>> impulses(npix);
  for (const Event& e : stream.events) {
    if (e.polarity == config.negative_polarity) continue;
    if (e.x < r.x || e.x >= r.x + r.width || e.y < r.y || e.y >= r.y + r.height) continue;
    const size_t bin = static_cast<size_t>(e.t / config.bin_us);
    if (bin >= n_fft) continue;  // beyond the transform length
    impulses[static_cast<size_t>(e.y - r.y) * r.width + (e.x - r.x)].push_back(
        static_cast<uint32_t>(bin));
  }

  // Hann window over the sampled extent (symmetric; single-sample degenerates
  // to 1).
  std::vector<double> hann(n_samples);
  if (n_samples == 1) {
    hann[0] = 1.0;
  } else {
    for (size_t m = 0; m < n_samples; ++m) {
      hann[m] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(m) /
                                     static_cast<double>(n_samples - 1));
    }
  }

  detail::RealFft fft(n_fft);
  std::fill(fft.in(), fft.in() + n_fft, 0.0);
  FftBaselineResult result;
  result.n_fft = static_cast<int>(n_fft);
  result.bin_hz = 1e6 / (static_cast<double>(config.bin_us) * static_cast<double>(n_fft));
  result.map.width = r.width;
  result.map.height = r.height;
  result.map.rates.assign(npix, kNoEstimate);

  std::vector<int64_t> peak_bin(npix, -1);
  bool any = false;
  for (size_t p = 0; p < npix; ++p) {
    const auto& bins = impulses[p];
    if (bins.empty()) continue;
    any = true;
    for (uint32_t b : bins) fft.in()[b] += hann[b];  // impulses in one bin add up
    fft.forward();
    const std::complex<double>* spec = fft.out();
    size_t best = 1;
    double best_mag = std::norm(spec[1]);
    for (size_t k = 2; k < fft.bins(); ++k) {
      const double mag = std::norm(spec[k]);
      // Ties keep the lower frequency. An impulse train has harmonics of
      // equal analytic magnitude, so equality must tolerate FFT roundoff.
      if (mag > best_mag * (1.0 + 1e-9)) {
        best_mag = mag;
        best = k;
      }
    }
    peak_bin[p] = static_cast<int64_t>(best);
    result.map.rates[p] = static_cast<double>(best) * result.bin_hz;
    for (uint32_t b : bins) fft.in()[b] = 0.0;
  }
  if (!any) throw Error(Errc::no_estimate, "no events of the selected polarity");

  // 3x3 median filter on the DFT-bin grid, using whatever neighbors have
  // estimates; pixels without an estimate stay empty.
  std::vector<int64_t> filtered(npix, -1);
  std::vector<int64_t> neighborhood;
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) {
      const size_t p = static_cast<size_t>(y) * r.width + x;
      if (peak_bin[p] < 0) continue;
      neighborhood.clear();
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= r.width || ny >= r.height) continue;
          const int64_t v = peak_bin[static_cast<size_t>(ny) * r.width + nx];
          if (v >= 0) neighborhood.push_back(v);
        }
      }
      filtered[p] = median_lower(neighborhood);
    }
  }

  std::map<int64_t, size_t> histogram;
  for (size_t p = 0; p < npix; ++p) {
    if (filtered[p] >= 0) ++histogram[filtered[p]];
    result.map.rates[p] = filtered[p] >= 0 ? static_cast<double>(filtered[p]) * result.bin_hz
                                           : kNoEstimate;
  }
  int64_t mode_bin = -1;
  size_t mode_count = 0;
  for (const auto& [bin, count] : histogram) {
    if (count > mode_count) {  // first key wins ties: lower frequency
      mode_count = count;
      mode_bin = bin;
    }
  }
  result.rate_hz = static_cast<double>(mode_bin) * result.bin_hz;
  return result;
}

}  // namespace evrate
