#pragma once

#include <cstdint>
#include <string>

#include "evrate/events.hpp"

namespace evrate {

enum class SynthKind {
  flash,                // whole region brightens/darkens at the target rate
  rotating_line,        // radial line spinning about a center
  rotating_dot,         // dot orbiting a center
  vibrating_edge,       // horizontal edge oscillating vertically
  translating_pattern,  // repeating stripes translating horizontally
};

const char* synth_kind_name(SynthKind kind) noexcept;
SynthKind synth_kind_from_name(const std::string& name);

/// Ground-truth-exact event stream description. Moving-feature generators
/// sample positions every sample_dt_us and emit events for pixels the
/// feature enters (negative, dark feature arriving) and leaves (positive).
struct SynthSpec {
  SynthKind kind = SynthKind::flash;
  double rate_hz = 0;
  int64_t duration_us = 0;
  uint16_t width = 0;
  uint16_t height = 0;

  Roi region{0, 0, 0, 0};  // flash / vibrating_edge / translating_pattern; zero = full frame
  double duty = 0.5;       // flash on-fraction

  double center_x = -1;  // rotating kinds; negative = frame center
  double center_y = -1;
  double radius = 0;      // line length / orbit radius, px
  double dot_radius = 2;  // rotating_dot

  double amplitude = 0;  // vibrating_edge, px
  int edge_y = -1;       // vibrating_edge rest row; negative = region center

  int pattern_pitch_px = 0;  // translating_pattern stripe spacing

  int64_t sample_dt_us = 25;
  double jitter_us = 0;    // gaussian timestamp noise, std
  double noise_rate = 0;   // uniform background events / pixel / second
  uint64_t seed = 0;
};

EventStream gen_flash(const SynthSpec& spec);
EventStream gen_rotating_line(const SynthSpec& spec);
EventStream gen_rotating_dot(const SynthSpec& spec);
EventStream gen_vibrating_edge(const SynthSpec& spec);
EventStream gen_translating_pattern(const SynthSpec& spec);

/// Dispatch on spec.kind. Throws Error{invalid_spec} for inconsistent specs.
EventStream generate(const SynthSpec& spec);

}  // namespace evrate
