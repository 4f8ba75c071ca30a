#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "evrate/baselines.hpp"
#include "evrate/bench.hpp"
#include "evrate/estimate.hpp"
#include "evrate/io.hpp"
#include "evrate/synth.hpp"

namespace py = pybind11;
using namespace evrate;

namespace {

using I64Array = py::array_t<int64_t, py::array::c_style | py::array::forcecast>;
using U16Array = py::array_t<uint16_t, py::array::c_style | py::array::forcecast>;
using BoolArray = py::array_t<bool, py::array::c_style | py::array::forcecast>;

EventStream stream_from_arrays(const I64Array& t, const U16Array& x, const U16Array& y,
                               const BoolArray& p, uint16_t width, uint16_t height) {
  const auto n = static_cast<size_t>(t.size());
  if (static_cast<size_t>(x.size()) != n || static_cast<size_t>(y.size()) != n ||
      static_cast<size_t>(p.size()) != n) {
    throw py::value_error("t, x, y, p must have equal length");
  }
  std::vector<Event> events(n);
  const auto* tp = t.data();
  const auto* xp = x.data();
  const auto* yp = y.data();
  const auto* pp = p.data();
  for (size_t i = 0; i < n; ++i) events[i] = {tp[i], xp[i], yp[i], pp[i]};
  return validate_stream(std::move(events), width, height);
}

py::dict stream_to_dict(const EventStream& stream) {
  const auto n = static_cast<py::ssize_t>(stream.size());
  py::array_t<int64_t> t(n);
  py::array_t<uint16_t> x(n), y(n);
  py::array_t<bool> p(n);
  auto* tp = t.mutable_data();
  auto* xp = x.mutable_data();
  auto* yp = y.mutable_data();
  auto* pp = p.mutable_data();
  for (py::ssize_t i = 0; i < n; ++i) {
    const Event& e = stream.events[static_cast<size_t>(i)];
    tp[i] = e.t;
    xp[i] = e.x;
    yp[i] = e.y;
    pp[i] = e.polarity;
  }
  py::dict d;
  d["t"] = t;
  d["x"] = x;
  d["y"] = y;
  d["p"] = p;
  d["width"] = stream.width;
  d["height"] = stream.height;
  d["duration_us"] = stream.duration_us;
  return d;
}

std::optional<Roi> roi_from_tuple(const std::optional<std::tuple<int, int, int, int>>& roi) {
  if (!roi) return std::nullopt;
  return Roi{std::get<0>(*roi), std::get<1>(*roi), std::get<2>(*roi), std::get<3>(*roi)};
}

CorrelationMethod method_from_name(const std::string& name) {
  if (name == "auto") return CorrelationMethod::automatic;
  if (name == "direct") return CorrelationMethod::direct;
  if (name == "fft") return CorrelationMethod::fft;
  throw py::value_error("method must be auto, direct or fft");
}

}  // namespace

PYBIND11_MODULE(_evrate, m) {
  m.doc() = "Rate estimation for periodic phenomena in event-camera streams";

  py::register_exception<Error>(m, "EvrateError");

  m.def(
      "estimate",
      [](const I64Array& t, const U16Array& x, const U16Array& y, const BoolArray& p,
         uint16_t width, uint16_t height, int window_px, int64_t template_events,
         int64_t t_quant_us, double min_prominence, int min_separation_bins,
         double max_template_fraction, const std::string& method, int threads,
         const std::optional<std::tuple<int, int, int, int>>& roi) {
        EstimateConfig cfg;
        cfg.window_px = window_px;
        cfg.template_events = template_events;
        cfg.t_quant_us = t_quant_us;
        cfg.peaks.min_prominence = min_prominence;
        cfg.peaks.min_separation_bins = min_separation_bins;
        cfg.max_template_fraction = max_template_fraction;
        cfg.method = method_from_name(method);
        cfg.threads = threads;
        const EventStream stream = stream_from_arrays(t, x, y, p, width, height);
        RateEstimate est;
        {
          py::gil_scoped_release release;
          est = estimate(stream, cfg, roi_from_tuple(roi));
        }
        py::dict d;
        d["rate_hz"] = est.rate_hz;
        d["period_us"] = est.period_us;
        d["accepted_windows"] = est.accepted_windows;
        d["total_windows"] = est.windows.size();
        py::list windows;
        for (const auto& w : est.windows) {
          py::dict wd;
          wd["area_index"] = w.area_index;
          wd["status"] = window_status_name(w.status);
          wd["peak_offsets"] = w.peak_offsets;
          wd["period_us"] = w.period_us;
          wd["template_depth_bins"] = w.template_depth_bins;
          wd["template_event_count"] = w.template_event_count;
          windows.append(wd);
        }
        d["windows"] = windows;
        return d;
      },
      py::arg("t"), py::arg("x"), py::arg("y"), py::arg("p"), py::arg("width"), py::arg("height"),
      py::arg("window_px") = 45, py::arg("template_events") = 1800, py::arg("t_quant_us") = 100,
      py::arg("min_prominence") = 0.3, py::arg("min_separation_bins") = 2,
      py::arg("max_template_fraction") = 0.25, py::arg("method") = "auto", py::arg("threads") = 1,
      py::arg("roi") = py::none(),
      "Correlation-based rate estimate; returns a dict with rate_hz and window diagnostics");

  m.def(
      "simple_baseline",
      [](const I64Array& t, const U16Array& x, const U16Array& y, const BoolArray& p,
         uint16_t width, uint16_t height, int window_px,
         const std::optional<std::tuple<int, int, int, int>>& roi) {
        const EventStream stream = stream_from_arrays(t, x, y, p, width, height);
        const SimpleBaselineResult est = simple_baseline(stream, window_px, roi_from_tuple(roi));
        py::dict d;
        d["rate_hz"] = est.rate_hz;
        d["period_us"] = est.period_us;
        d["window_rates_hz"] = est.window_rates;
        return d;
      },
      py::arg("t"), py::arg("x"), py::arg("y"), py::arg("p"), py::arg("width"), py::arg("height"),
      py::arg("window_px") = 45, py::arg("roi") = py::none(),
      "Per-pixel temporal-median baseline");

  m.def(
      "fft_baseline",
      [](const I64Array& t, const U16Array& x, const U16Array& y, const BoolArray& p,
         uint16_t width, uint16_t height, const std::string& polarity, int64_t bin_us, int n_fft,
         const std::optional<std::tuple<int, int, int, int>>& roi) {
        FftBaselineConfig cfg;
        cfg.negative_polarity = polarity == "negative";
        cfg.bin_us = bin_us;
        cfg.n_fft = n_fft;
        const EventStream stream = stream_from_arrays(t, x, y, p, width, height);
        const FftBaselineResult est = fft_baseline(stream, cfg, roi_from_tuple(roi));
        py::dict d;
        d["rate_hz"] = est.rate_hz;
        d["n_fft"] = est.n_fft;
        d["bin_hz"] = est.bin_hz;
        py::array_t<double> map_arr({est.map.height, est.map.width});
        std::copy(est.map.rates.begin(), est.map.rates.end(), map_arr.mutable_data());
        d["rate_map"] = map_arr;
        return d;
      },
      py::arg("t"), py::arg("x"), py::arg("y"), py::arg("p"), py::arg("width"), py::arg("height"),
      py::arg("polarity") = "negative", py::arg("bin_us") = 100, py::arg("n_fft") = 0,
      py::arg("roi") = py::none(), "Per-pixel Fourier baseline; rate_map holds NaN where empty");

  m.def(
      "synth",
      [](const std::string& kind, double rate_hz, int64_t duration_us, uint16_t width,
         uint16_t height, const std::optional<std::tuple<int, int, int, int>>& region, double duty,
         double center_x, double center_y, double radius, double dot_radius, double amplitude,
         int edge_y, int pattern_pitch_px, int64_t sample_dt_us, double jitter_us,
         double noise_rate, uint64_t seed) {
        SynthSpec spec;
        spec.kind = synth_kind_from_name(kind);
        spec.rate_hz = rate_hz;
        spec.duration_us = duration_us;
        spec.width = width;
        spec.height = height;
        if (region) spec.region = *roi_from_tuple(region);
        spec.duty = duty;
        spec.center_x = center_x;
        spec.center_y = center_y;
        spec.radius = radius;
        spec.dot_radius = dot_radius;
        spec.amplitude = amplitude;
        spec.edge_y = edge_y;
        spec.pattern_pitch_px = pattern_pitch_px;
        spec.sample_dt_us = sample_dt_us;
        spec.jitter_us = jitter_us;
        spec.noise_rate = noise_rate;
        spec.seed = seed;
        return stream_to_dict(generate(spec));
      },
      py::arg("kind"), py::arg("rate_hz"), py::arg("duration_us"), py::arg("width"),
      py::arg("height"), py::arg("region") = py::none(), py::arg("duty") = 0.5,
      py::arg("center_x") = -1.0, py::arg("center_y") = -1.0, py::arg("radius") = 0.0,
      py::arg("dot_radius") = 2.0, py::arg("amplitude") = 0.0, py::arg("edge_y") = -1,
      py::arg("pattern_pitch_px") = 0, py::arg("sample_dt_us") = 25, py::arg("jitter_us") = 0.0,
      py::arg("noise_rate") = 0.0, py::arg("seed") = 0,
      "Generate a synthetic stream with exact ground truth; returns event arrays");

  m.def(
      "read_events",
      [](const std::string& path) { return stream_to_dict(read_events(path)); }, py::arg("path"),
      "Read a text or binary event file (format sniffed)");

  m.def(
      "write_events",
      [](const std::string& path, const I64Array& t, const U16Array& x, const U16Array& y,
         const BoolArray& p, uint16_t width, uint16_t height, std::optional<int64_t> duration_us,
         const std::string& format) {
        EventStream stream = stream_from_arrays(t, x, y, p, width, height);
        if (duration_us) {
          if (*duration_us < stream.duration_us) {
            throw py::value_error("duration_us shorter than the last event");
          }
          stream.duration_us = *duration_us;
        }
        write_events(stream, path, format == "text" ? FileFormat::text : FileFormat::binary);
      },
      py::arg("path"), py::arg("t"), py::arg("x"), py::arg("y"), py::arg("p"), py::arg("width"),
      py::arg("height"), py::arg("duration_us") = py::none(), py::arg("format") = "binary",
      "Write events to the text or EVS1 binary format");
}
