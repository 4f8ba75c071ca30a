#include "evrate/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace evrate {

namespace {

struct PixelPos {
  int x, y;
  friend auto operator<=>(const PixelPos&, const PixelPos&) = default;
};

void check_common(const SynthSpec& spec) {
  if (!(spec.rate_hz > 0)) throw Error(Errc::invalid_spec, "rate_hz must be positive");
  if (spec.width < 1 || spec.height < 1) throw Error(Errc::invalid_spec, "sensor size missing");
  if (spec.duration_us < static_cast<int64_t>(std::ceil(2e6 / spec.rate_hz))) {
    throw Error(Errc::invalid_spec, "duration must cover at least two periods");
  }
  if (spec.sample_dt_us < 1) throw Error(Errc::invalid_spec, "sample_dt_us must be >= 1");
  if (spec.jitter_us < 0 || spec.noise_rate < 0) {
    throw Error(Errc::invalid_spec, "jitter and noise must be non-negative");
  }
}

Roi effective_region(const SynthSpec& spec) {
  Roi r = spec.region;
  if (r.width == 0 && r.height == 0) r = {0, 0, spec.width, spec.height};
  if (r.width < 1 || r.height < 1 || r.x < 0 || r.y < 0 || r.x + r.width > spec.width ||
      r.y + r.height > spec.height) {
    throw Error(Errc::invalid_spec, "region does not fit inside the sensor");
  }
  return r;
}

// Fraction of a period elapsed at integer time t. long double keeps the
// phase exact across periods when the period divides the duration evenly.
double phase_at(int64_t t_us, double rate_hz) {
  const long double cycles = static_cast<long double>(t_us) * static_cast<long double>(rate_hz) /
                             1'000'000.0L;
  return static_cast<double>(cycles - std::floor(cycles));
}

void append_noise_and_finish(std::vector<Event>& events, const SynthSpec& spec,
                             std::mt19937_64& rng) {
  if (spec.noise_rate > 0) {
    const double expected = spec.noise_rate * static_cast<double>(spec.width) * spec.height *
                            static_cast<double>(spec.duration_us) * 1e-6;
    std::poisson_distribution<int64_t> count_dist(expected);
    std::uniform_int_distribution<int> xd(0, spec.width - 1), yd(0, spec.height - 1);
    std::uniform_int_distribution<int64_t> td(0, spec.duration_us - 1);
    std::bernoulli_distribution pd(0.5);
    const int64_t n = count_dist(rng);
    for (int64_t i = 0; i < n; ++i) {
      events.push_back({td(rng), static_cast<uint16_t>(xd(rng)), static_cast<uint16_t>(yd(rng)),
                        pd(rng)});
    }
  }
  if (spec.jitter_us > 0) {
    std::normal_distribution<double> jd(0.0, spec.jitter_us);
    const double max_shift = 0.45e6 / spec.rate_hz;  // keep ordering within one period
    for (Event& e : events) {
      const double shift = std::clamp(jd(rng), -max_shift, max_shift);
      e.t = std::clamp<int64_t>(e.t + std::llround(shift), 0, spec.duration_us - 1);
    }
  }
}

EventStream finish_stream(std::vector<Event> events, const SynthSpec& spec) {
  EventStream stream = validate_stream(std::move(events), spec.width, spec.height);
  stream.duration_us = std::max(stream.duration_us, spec.duration_us);
  return stream;
}

// Shared driver for the moving-feature kinds: rasterizes the feature at each
// sample step and turns set differences into events. The feature starts
// "already visible" so no spurious full-feature burst lands at t = 0.
template <typename RasterFn>
EventStream run_moving_feature(const SynthSpec& spec, RasterFn raster) {
  std::vector<Event> events;
  std::vector<PixelPos> prev = raster(0);
  std::sort(prev.begin(), prev.end());
  prev.erase(std::unique(prev.begin(), prev.end()), prev.end());
  std::vector<PixelPos> cur, entered, exited;
  for (int64_t t = spec.sample_dt_us; t < spec.duration_us; t += spec.sample_dt_us) {
    cur = raster(t);
    std::sort(cur.begin(), cur.end());
    cur.erase(std::unique(cur.begin(), cur.end()), cur.end());
    entered.clear();
    exited.clear();
    std::set_difference(cur.begin(), cur.end(), prev.begin(), prev.end(),
                        std::back_inserter(entered));
    std::set_difference(prev.begin(), prev.end(), cur.begin(), cur.end(),
                        std::back_inserter(exited));
    for (const auto& p : entered) {
      events.push_back({t, static_cast<uint16_t>(p.x), static_cast<uint16_t>(p.y), false});
    }
    for (const auto& p : exited) {
      events.push_back({t, static_cast<uint16_t>(p.x), static_cast<uint16_t>(p.y), true});
    }
    prev.swap(cur);
  }
  std::mt19937_64 rng(spec.seed);
  append_noise_and_finish(events, spec, rng);
  return finish_stream(std::move(events), spec);
}

}  // namespace

const char* synth_kind_name(SynthKind kind) noexcept {
  switch (kind) {
    case SynthKind::flash: return "flash";
    case SynthKind::rotating_line: return "rotating_line";
    case SynthKind::rotating_dot: return "rotating_dot";
    case SynthKind::vibrating_edge: return "vibrating_edge";
    case SynthKind::translating_pattern: return "translating_pattern";
  }
  return "unknown";
}

SynthKind synth_kind_from_name(const std::string& name) {
  if (name == "flash") return SynthKind::flash;
  if (name == "rotating_line" || name == "rotating-line") return SynthKind::rotating_line;
  if (name == "rotating_dot" || name == "rotating-dot") return SynthKind::rotating_dot;
  if (name == "vibrating_edge" || name == "vibrating-edge") return SynthKind::vibrating_edge;
  if (name == "translating_pattern" || name == "translating-pattern")
    return SynthKind::translating_pattern;
  throw Error(Errc::invalid_spec, "unknown generator kind: " + name);
}

EventStream gen_flash(const SynthSpec& spec) {
  check_common(spec);
  if (!(spec.duty > 0.0 && spec.duty < 1.0)) {
    throw Error(Errc::invalid_spec, "duty must be in (0, 1)");
  }
  const Roi region = effective_region(spec);
  const double period_us = 1e6 / spec.rate_hz;

  std::vector<Event> events;
  const size_t region_px = static_cast<size_t>(region.width) * region.height;
  const size_t cycles = static_cast<size_t>(spec.duration_us / period_us) + 2;
  events.reserve(std::min<size_t>(2 * region_px * cycles, events.max_size()));
  for (size_t k = 0;; ++k) {
    const int64_t t_rise = std::llround(static_cast<double>(k) * period_us);
    if (t_rise >= spec.duration_us) break;
    const int64_t t_fall = std::llround((static_cast<double>(k) + spec.duty) * period_us);
    for (int y = region.y; y < region.y + region.height; ++y) {
      for (int x = region.x; x < region.x + region.width; ++x) {
        events.push_back({t_rise, static_cast<uint16_t>(x), static_cast<uint16_t>(y), true});
      }
    }
    if (t_fall >= spec.duration_us) continue;
    for (int y = region.y; y < region.y + region.height; ++y) {
      for (int x = region.x; x < region.x + region.width; ++x) {
        events.push_back({t_fall, static_cast<uint16_t>(x), static_cast<uint16_t>(y), false});
      }
    }
  }
  std::mt19937_64 rng(spec.seed);
  append_noise_and_finish(events, spec, rng);
  return finish_stream(std::move(events), spec);
}

EventStream gen_rotating_line(const SynthSpec& spec) {
  check_common(spec);
  if (spec.radius < 1) throw Error(Errc::invalid_spec, "radius must be >= 1 px");
  const double cx = spec.center_x >= 0 ? spec.center_x : spec.width / 2.0;
  const double cy = spec.center_y >= 0 ? spec.center_y : spec.height / 2.0;

  const int steps = static_cast<int>(std::ceil(spec.radius * 2.0)) + 1;
  return run_moving_feature(spec, [&](int64_t t) {
    const double theta = 2.0 * std::numbers::pi * phase_at(t, spec.rate_hz);
    const double dx = std::cos(theta), dy = std::sin(theta);
    std::vector<PixelPos> pixels;
    pixels.reserve(steps);
    for (int s = 0; s <= steps; ++s) {
      const double rr = spec.radius * static_cast<double>(s) / steps;
      const int px = static_cast<int>(std::lround(cx + rr * dx));
      const int py = static_cast<int>(std::lround(cy + rr * dy));
      if (px < 0 || py < 0 || px >= spec.width || py >= spec.height) continue;
      pixels.push_back({px, py});
    }
    return pixels;
  });
}

EventStream gen_rotating_dot(const SynthSpec& spec) {
  check_common(spec);
  if (spec.radius < 1) throw Error(Errc::invalid_spec, "orbit radius must be >= 1 px");
  if (spec.dot_radius < 1) throw Error(Errc::invalid_spec, "dot radius must be >= 1 px");
  const double cx = spec.center_x >= 0 ? spec.center_x : spec.width / 2.0;
  const double cy = spec.center_y >= 0 ? spec.center_y : spec.height / 2.0;

  return run_moving_feature(spec, [&](int64_t t) {
    const double theta = 2.0 * std::numbers::pi * phase_at(t, spec.rate_hz);
    const double dcx = cx + spec.radius * std::cos(theta);
    const double dcy = cy + spec.radius * std::sin(theta);
    std::vector<PixelPos> pixels;
    const int rr = static_cast<int>(std::ceil(spec.dot_radius));
    for (int py = static_cast<int>(dcy) - rr; py <= static_cast<int>(dcy) + rr + 1; ++py) {
      for (int px = static_cast<int>(dcx) - rr; px <= static_cast<int>(dcx) + rr + 1; ++px) {
        if (px < 0 || py < 0 || px >= spec.width || py >= spec.height) continue;
        const double ddx = px - dcx, ddy = py - dcy;
        if (ddx * ddx + ddy * ddy <= spec.dot_radius * spec.dot_radius) pixels.push_back({px, py});
      }
    }
    return pixels;
  });
}

EventStream gen_vibrating_edge(const SynthSpec& spec) {
  check_common(spec);
  if (spec.amplitude < 0) throw Error(Errc::invalid_spec, "amplitude must be >= 0");
  const Roi region = effective_region(spec);
  const double y0 = spec.edge_y >= 0 ? spec.edge_y : region.y + region.height / 2.0;

  // Rows at or below the edge are covered; crossing direction sets polarity.
  const auto edge_row = [&](int64_t t) {
    const double phase = phase_at(t, spec.rate_hz);
    return y0 + spec.amplitude * std::sin(2.0 * std::numbers::pi * phase);
  };

  std::vector<Event> events;
  double prev_edge = edge_row(0);
  for (int64_t t = spec.sample_dt_us; t < spec.duration_us; t += spec.sample_dt_us) {
    const double cur_edge = edge_row(t);
    const int prev_row = static_cast<int>(std::floor(prev_edge));
    const int cur_row = static_cast<int>(std::floor(cur_edge));
    if (cur_row != prev_row) {
      const bool moving_down = cur_row > prev_row;
      const int lo = std::min(prev_row, cur_row) + 1;
      const int hi = std::max(prev_row, cur_row);
      for (int row = lo; row <= hi; ++row) {
        if (row < region.y || row >= region.y + region.height) continue;
        for (int x = region.x; x < region.x + region.width; ++x) {
          // edge moving down uncovers rows (brighter), moving up covers them
          events.push_back({t, static_cast<uint16_t>(x), static_cast<uint16_t>(row), moving_down});
        }
      }
    }
    prev_edge = cur_edge;
  }
  std::mt19937_64 rng(spec.seed);
  append_noise_and_finish(events, spec, rng);
  return finish_stream(std::move(events), spec);
}

EventStream gen_translating_pattern(const SynthSpec& spec) {
  check_common(spec);
  if (spec.pattern_pitch_px < 1) {
    throw Error(Errc::invalid_spec, "pattern pitch must be >= 1 px (zero velocity)");
  }
  const Roi region = effective_region(spec);
  const int pitch = spec.pattern_pitch_px;

  return run_moving_feature(spec, [&](int64_t t) {
    // one pitch of travel per period => pattern passage at rate_hz
    const double offset = static_cast<double>(pitch) * phase_at(t, spec.rate_hz);
    const int shift = static_cast<int>(std::lround(offset)) % pitch;
    std::vector<PixelPos> pixels;
    for (int x = region.x; x < region.x + region.width; ++x) {
      if ((x - region.x + pitch - shift) % pitch != 0) continue;
      for (int y = region.y; y < region.y + region.height; ++y) pixels.push_back({x, y});
    }
    return pixels;
  });
}

EventStream generate(const SynthSpec& spec) {
  switch (spec.kind) {
    case SynthKind::flash: return gen_flash(spec);
    case SynthKind::rotating_line: return gen_rotating_line(spec);
    case SynthKind::rotating_dot: return gen_rotating_dot(spec);
    case SynthKind::vibrating_edge: return gen_vibrating_edge(spec);
    case SynthKind::translating_pattern: return gen_translating_pattern(spec);
  }
  throw Error(Errc::invalid_spec, "unknown generator kind");
}

}  // namespace evrate
