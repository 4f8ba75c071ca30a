#include "evrate/estimate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <numeric>

#include "fft.hpp"
#include "parallel.hpp"

namespace evrate {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void check_config(const EstimateConfig& c) {
  if (c.window_px < 1) throw Error(Errc::invalid_spec, "window_px must be >= 1");
  if (c.template_events < 1) throw Error(Errc::invalid_spec, "template_events must be >= 1");
  if (c.t_quant_us < 1) throw Error(Errc::invalid_spec, "t_quant_us must be >= 1");
  if (!(c.max_template_fraction > 0.0) || c.max_template_fraction > 1.0)
    throw Error(Errc::invalid_spec, "max_template_fraction must be in (0, 1]");
  if (!(c.peaks.min_prominence > 0.0) || c.peaks.min_prominence > 1.0)
    throw Error(Errc::invalid_spec, "min_prominence must be in (0, 1]");
  if (c.peaks.min_separation_bins < 1)
    throw Error(Errc::invalid_spec, "min_separation_bins must be >= 1");
}

ResponseSeries correlate_direct(const VoxelGrid& grid, const AreaRef& area,
                                const CorrelationTemplate& tmpl) {
  const size_t n_offsets = static_cast<size_t>(grid.depth() - tmpl.depth_bins) + 1;
  ResponseSeries resp{area.index, std::vector<double>(n_offsets, 0.0)};
  for (int ly = 0; ly < area.size; ++ly) {
    for (int lx = 0; lx < area.size; ++lx) {
      const auto tcol = tmpl.column(lx, ly);
      if (tcol.empty()) continue;
      const auto acol = grid.column(area.x0 + lx, area.y0 + ly);
      for (const auto& tc : tcol) {
        // area cells with bin in [tc.bin, tc.bin + n_offsets)
        auto it = std::lower_bound(acol.begin(), acol.end(), tc.bin,
                                   [](const VoxelGrid::Cell& c, uint32_t b) { return c.bin < b; });
        const uint32_t end_bin = tc.bin + static_cast<uint32_t>(n_offsets);
        for (; it != acol.end() && it->bin < end_bin; ++it) {
          resp.scores[it->bin - tc.bin] += it->value * tc.value;
        }
      }
    }
  }
  return resp;
}

ResponseSeries correlate_fft(const VoxelGrid& grid, const AreaRef& area,
                             const CorrelationTemplate& tmpl) {
  const size_t n_offsets = static_cast<size_t>(grid.depth() - tmpl.depth_bins) + 1;
  // Circular correlation at length >= D has no wrap-around inside
  // [0, D - d], so padding to the next power of two past D is exact.
  const size_t len = detail::RealFft::next_pow2(std::max(grid.depth(), 2));
  detail::RealFft fft(len);
  std::vector<std::complex<double>> acc(fft.bins(), {0.0, 0.0});
  std::vector<std::complex<double>> tspec(fft.bins());
  std::fill(fft.in(), fft.in() + len, 0.0);

  for (int ly = 0; ly < area.size; ++ly) {
    for (int lx = 0; lx < area.size; ++lx) {
      const auto tcol = tmpl.column(lx, ly);
      if (tcol.empty()) continue;
      const auto acol = grid.column(area.x0 + lx, area.y0 + ly);
      if (acol.empty()) continue;

      for (const auto& c : tcol) fft.in()[c.bin] = c.value;
      fft.forward();
      std::copy(fft.out(), fft.out() + fft.bins(), tspec.begin());
      for (const auto& c : tcol) fft.in()[c.bin] = 0.0;

      for (const auto& c : acol) fft.in()[c.bin] = c.value;
      fft.forward();
      const std::complex<double>* aspec = fft.out();
      for (size_t k = 0; k < acc.size(); ++k) acc[k] += aspec[k] * std::conj(tspec[k]);
      for (const auto& c : acol) fft.in()[c.bin] = 0.0;
    }
  }

  std::vector<double> full(len);
  fft.inverse(acc.data(), full.data());
  ResponseSeries resp{area.index, std::vector<double>(n_offsets)};
  const double scale = 1.0 / static_cast<double>(len);
  for (size_t tau = 0; tau < n_offsets; ++tau) resp.scores[tau] = full[tau] * scale;
  return resp;
}

CorrelationMethod pick_method(const VoxelGrid& grid, const AreaRef& area,
                              const CorrelationTemplate& tmpl) {
  size_t direct_ops = 0;
  size_t active_px = 0;
  for (int ly = 0; ly < area.size; ++ly) {
    for (int lx = 0; lx < area.size; ++lx) {
      const size_t nt = tmpl.column(lx, ly).size();
      if (nt == 0) continue;
      const size_t na = grid.column(area.x0 + lx, area.y0 + ly).size();
      if (na == 0) continue;
      direct_ops += na * nt;
      ++active_px;
    }
  }
  const size_t len = detail::RealFft::next_pow2(std::max(grid.depth(), 2));
  const double log2_len = std::log2(static_cast<double>(len));
  const double fft_ops = static_cast<double>(active_px) * 5.0 * len * log2_len;
  return static_cast<double>(direct_ops) <= fft_ops ? CorrelationMethod::direct
                                                    : CorrelationMethod::fft;
}

double median_lower(std::vector<int64_t> v) {
  const size_t mid = (v.size() - 1) / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  return static_cast<double>(v[mid]);
}

}  // namespace

const char* window_status_name(WindowStatus status) noexcept {
  switch (status) {
    case WindowStatus::accepted: return "accepted";
    case WindowStatus::empty_window: return "empty_window";
    case WindowStatus::insufficient_events: return "insufficient_events";
    case WindowStatus::too_few_peaks: return "too_few_peaks";
  }
  return "unknown";
}

TemplateSelection select_template(const VoxelGrid& grid, const AreaRef& area,
                                  std::span<const int64_t> events_per_bin, int64_t n_events,
                                  double max_fraction) {
  const int max_depth =
      std::max(1, static_cast<int>(std::floor(max_fraction * grid.depth())));

  int64_t total = 0;
  int depth = 0;
  for (size_t k = 0; k < events_per_bin.size() && depth == 0; ++k) {
    total += events_per_bin[k];
    if (total >= n_events) depth = static_cast<int>(k) + 1;
  }
  if (depth == 0) {
    return {total > 0 ? WindowStatus::insufficient_events : WindowStatus::empty_window,
            std::nullopt};
  }
  if (depth > max_depth) return {WindowStatus::insufficient_events, std::nullopt};

  CorrelationTemplate tmpl;
  tmpl.area_index = area.index;
  tmpl.x0 = area.x0;
  tmpl.y0 = area.y0;
  tmpl.size = area.size;
  tmpl.depth_bins = depth;
  tmpl.event_count = total;
  tmpl.col_offsets.assign(static_cast<size_t>(area.size) * area.size + 1, 0);
  for (int ly = 0; ly < area.size; ++ly) {
    for (int lx = 0; lx < area.size; ++lx) {
      const auto col = grid.column(area.x0 + lx, area.y0 + ly);
      for (const auto& c : col) {
        if (c.bin >= static_cast<uint32_t>(depth)) break;
        tmpl.cells.push_back(c);
      }
      tmpl.col_offsets[static_cast<size_t>(ly) * area.size + lx + 1] = tmpl.cells.size();
    }
  }
  return {WindowStatus::accepted, std::move(tmpl)};
}

ResponseSeries correlate_time(const VoxelGrid& grid, const AreaRef& area,
                              const CorrelationTemplate& tmpl, bool normalize,
                              CorrelationMethod method) {
  if (tmpl.depth_bins > grid.depth()) {
    throw Error(Errc::template_deeper_than_area, "template depth exceeds area depth");
  }
  if (method == CorrelationMethod::automatic) method = pick_method(grid, area, tmpl);
  ResponseSeries resp = method == CorrelationMethod::fft ? correlate_fft(grid, area, tmpl)
                                                         : correlate_direct(grid, area, tmpl);
  if (normalize && !resp.scores.empty()) {
    const auto [lo_it, hi_it] = std::minmax_element(resp.scores.begin(), resp.scores.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi > lo) {
      for (double& s : resp.scores) s = (s - lo) / (hi - lo);
    } else {
      std::fill(resp.scores.begin(), resp.scores.end(), 0.0);
    }
  }
  return resp;
}

std::vector<int> detect_peaks(std::span<const double> scores, const PeakParams& params) {
  const size_t n = scores.size();
  std::vector<int> maxima;
  if (n >= 3) {
    size_t i = 1;
    const size_t last = n - 1;
    while (i < last) {
      if (scores[i - 1] < scores[i]) {
        size_t ahead = i + 1;
        while (ahead < last && scores[ahead] == scores[i]) ++ahead;
        if (scores[ahead] < scores[i]) {
          maxima.push_back(static_cast<int>((i + ahead - 1) / 2));
        }
        i = ahead;
      } else {
        ++i;
      }
    }
  }
  if (maxima.empty()) return maxima;

  const auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
  const double threshold = params.min_prominence * (*hi_it - *lo_it);

  // Topographic prominence: walk out from the peak until a higher sample or
  // border; the deeper of the two interval minima is the base.
  std::vector<int> kept;
  for (int p : maxima) {
    const double h = scores[p];
    double left_min = h;
    for (int j = p - 1; j >= 0 && scores[j] <= h; --j) left_min = std::min(left_min, scores[j]);
    double right_min = h;
    for (size_t j = p + 1; j < n && scores[j] <= h; ++j)
      right_min = std::min(right_min, scores[j]);
    if (h - std::max(left_min, right_min) >= threshold) kept.push_back(p);
  }
  if (kept.size() < 2 || params.min_separation_bins <= 1) return kept;

  // Enforce separation, higher peaks take priority.
  std::vector<size_t> order(kept.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (scores[kept[a]] != scores[kept[b]]) return scores[kept[a]] > scores[kept[b]];
    return kept[a] < kept[b];
  });
  std::vector<char> alive(kept.size(), 1);
  for (size_t rank : order) {
    if (!alive[rank]) continue;
    for (size_t j = rank + 1; j < kept.size() && kept[j] - kept[rank] < params.min_separation_bins;
         ++j)
      alive[j] = 0;
    for (size_t j = rank; j-- > 0 && kept[rank] - kept[j] < params.min_separation_bins;)
      alive[j] = 0;
  }
  std::vector<int> out;
  for (size_t j = 0; j < kept.size(); ++j)
    if (alive[j]) out.push_back(kept[j]);
  return out;
}

WindowEstimate window_period(int area_index, std::vector<int> peak_offsets, int64_t t_quant_us) {
  WindowEstimate est;
  est.area_index = area_index;
  est.peak_offsets = std::move(peak_offsets);
  if (est.peak_offsets.size() < 2) {
    est.status = WindowStatus::too_few_peaks;
    return est;
  }
  std::vector<int64_t> deltas;
  deltas.reserve(est.peak_offsets.size() - 1);
  for (size_t i = 1; i < est.peak_offsets.size(); ++i)
    deltas.push_back(est.peak_offsets[i] - est.peak_offsets[i - 1]);
  est.status = WindowStatus::accepted;
  est.period_us = median_lower(std::move(deltas)) * static_cast<double>(t_quant_us);
  return est;
}

RateEstimate aggregate_windows(std::vector<WindowEstimate> windows, const EstimateConfig& config) {
  std::vector<double> periods;
  for (const auto& w : windows)
    if (w.status == WindowStatus::accepted) periods.push_back(w.period_us);
  if (periods.empty()) {
    throw Error(Errc::no_valid_windows, "no window produced a period estimate");
  }
  std::sort(periods.begin(), periods.end());
  const size_t n = periods.size();
  const double period = n % 2 == 1 ? periods[n / 2]
                                   : 0.5 * (periods[n / 2 - 1] + periods[n / 2]);
  RateEstimate est;
  est.period_us = period;
  est.rate_hz = 1e6 / period;
  est.accepted_windows = static_cast<int>(n);
  est.windows = std::move(windows);
  est.config = config;
  return est;
}

RateEstimate estimate(const EventStream& stream, const EstimateConfig& config,
                      std::optional<Roi> roi) {
  check_config(config);
  if (stream.empty()) throw Error(Errc::empty_stream, "event stream is empty");

  const auto t_start = Clock::now();
  const VoxelGrid grid = quantize(stream, config.t_quant_us, roi);
  const auto areas = split_windows(grid, config.window_px);

  // Raw per-bin event counts per window, for template depth selection.
  const Roi r = roi.value_or(Roi{0, 0, stream.width, stream.height});
  const int nx = grid.width() / config.window_px;
  const int ny = grid.height() / config.window_px;
  std::vector<std::vector<int64_t>> bin_counts(areas.size());
  for (auto& counts : bin_counts) counts.assign(grid.depth(), 0);
  for (const Event& e : stream.events) {
    if (e.x < r.x || e.x >= r.x + r.width || e.y < r.y || e.y >= r.y + r.height) continue;
    const int wx = (e.x - r.x) / config.window_px;
    const int wy = (e.y - r.y) / config.window_px;
    if (wx >= nx || wy >= ny) continue;  // dropped margin
    ++bin_counts[static_cast<size_t>(wy) * nx + wx][e.t / config.t_quant_us];
  }
  const double quantize_ms = ms_since(t_start);

  const auto t_windows = Clock::now();
  std::vector<WindowEstimate> results(areas.size());
  detail::parallel_for(areas.size(), config.threads, [&](int, size_t i) {
    const AreaRef& area = areas[i];
    TemplateSelection sel = select_template(grid, area, bin_counts[i], config.template_events,
                                            config.max_template_fraction);
    if (!sel.tmpl) {
      results[i].area_index = area.index;
      results[i].status = sel.status;
      return;
    }
    const ResponseSeries resp = correlate_time(grid, area, *sel.tmpl, false, config.method);
    const std::vector<int> peaks = detect_peaks(resp.scores, config.peaks);
    results[i] = window_period(area.index, peaks, config.t_quant_us);
    results[i].template_depth_bins = sel.tmpl->depth_bins;
    results[i].template_event_count = sel.tmpl->event_count;
  });
  const double windows_ms = ms_since(t_windows);

  RateEstimate est = aggregate_windows(std::move(results), config);
  est.timings.quantize_ms = quantize_ms;
  est.timings.windows_ms = windows_ms;
  est.timings.total_ms = ms_since(t_start);
  return est;
}

}  // namespace evrate
