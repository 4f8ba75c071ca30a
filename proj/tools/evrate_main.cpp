// evrate command-line tool: estimate rates of periodic phenomena from event
// streams, run the reference baselines, generate synthetic streams and drive
// benchmark suites.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "evrate/bench.hpp"
#include "evrate/io.hpp"

namespace {

using nlohmann::ordered_json;

struct GlobalOpts {
  std::string format = "auto";
  std::string output = "text";
  std::vector<int> roi;
  int64_t start_us = 0;
  int64_t duration_us = 1'000'000;  // one-second segments by default
  int threads = 1;
  bool strict_order = false;
};

std::optional<evrate::Roi> parse_roi(const std::vector<int>& roi) {
  if (roi.empty()) return std::nullopt;
  return evrate::Roi{roi[0], roi[1], roi[2], roi[3]};
}

evrate::FileFormat parse_format(const std::string& name) {
  if (name == "auto") return evrate::FileFormat::auto_detect;
  if (name == "text") return evrate::FileFormat::text;
  if (name == "binary") return evrate::FileFormat::binary;
  throw evrate::Error(evrate::Errc::invalid_spec, "format must be auto, text or binary");
}

evrate::EventStream load_input(const std::string& path, const GlobalOpts& opts) {
  evrate::EventStream stream =
      evrate::read_events(path, parse_format(opts.format), std::nullopt, std::nullopt,
                          opts.strict_order);
  return evrate::slice_stream(stream, opts.start_us, opts.duration_us);
}

int exit_code_for(const evrate::Error& e) {
  switch (e.code()) {
    case evrate::Errc::no_valid_windows:
    case evrate::Errc::no_estimate:
    case evrate::Errc::empty_stream:
      return 2;
    default:
      return 1;
  }
}

ordered_json window_json(const evrate::WindowEstimate& w) {
  ordered_json j;
  j["area_index"] = w.area_index;
  j["status"] = evrate::window_status_name(w.status);
  j["peak_offsets"] = w.peak_offsets;
  j["period_us"] = w.period_us;
  j["template_depth_bins"] = w.template_depth_bins;
  j["template_event_count"] = w.template_event_count;
  return j;
}

void print_rate_estimate(const evrate::RateEstimate& est, const std::string& output) {
  int rejected = static_cast<int>(est.windows.size()) - est.accepted_windows;
  if (output == "json") {
    ordered_json j;
    j["rate_hz"] = est.rate_hz;
    j["period_us"] = est.period_us;
    j["accepted_windows"] = est.accepted_windows;
    j["rejected_windows"] = rejected;
    j["config"] = {{"window_px", est.config.window_px},
                   {"template_events", est.config.template_events},
                   {"t_quant_us", est.config.t_quant_us},
                   {"min_prominence", est.config.peaks.min_prominence},
                   {"min_separation_bins", est.config.peaks.min_separation_bins},
                   {"max_template_fraction", est.config.max_template_fraction}};
    j["timings_ms"] = {{"quantize", est.timings.quantize_ms},
                       {"windows", est.timings.windows_ms},
                       {"total", est.timings.total_ms}};
    j["windows"] = ordered_json::array();
    for (const auto& w : est.windows) j["windows"].push_back(window_json(w));
    std::cout << j.dump(2) << "\n";
  } else {
    std::printf("rate_hz: %.4f\n", est.rate_hz);
    std::printf("period_us: %.4f\n", est.period_us);
    std::printf("windows: %d accepted, %d rejected\n", est.accepted_windows, rejected);
  }
}

int run_estimate(const std::string& input, const GlobalOpts& opts,
                 const evrate::EstimateConfig& config) {
  evrate::EstimateConfig cfg = config;
  cfg.threads = opts.threads;
  const auto est = evrate::estimate(load_input(input, opts), cfg, parse_roi(opts.roi));
  print_rate_estimate(est, opts.output);
  return 0;
}

int run_simple(const std::string& input, const GlobalOpts& opts, int window_px) {
  const auto est = evrate::simple_baseline(load_input(input, opts), window_px, parse_roi(opts.roi));
  if (opts.output == "json") {
    ordered_json j;
    j["method"] = "simple";
    j["rate_hz"] = est.rate_hz;
    j["period_us"] = est.period_us;
    j["windows_with_estimate"] = est.window_rates.size();
    j["window_rates_hz"] = est.window_rates;
    std::cout << j.dump(2) << "\n";
  } else {
    std::printf("rate_hz: %.4f\n", est.rate_hz);
    std::printf("period_us: %.4f\n", est.period_us);
    std::printf("windows with estimate: %zu\n", est.window_rates.size());
  }
  return 0;
}

int run_fft(const std::string& input, const GlobalOpts& opts,
            const evrate::FftBaselineConfig& config, const std::string& map_path) {
  const auto est = evrate::fft_baseline(load_input(input, opts), config, parse_roi(opts.roi));
  if (!map_path.empty()) {
    std::ofstream out(map_path);
    out << "x,y,rate_hz\n";
    for (int y = 0; y < est.map.height; ++y) {
      for (int x = 0; x < est.map.width; ++x) {
        const double v = est.map.at(x, y);
        if (evrate::RateMap::has_estimate(v)) out << x << ',' << y << ',' << v << '\n';
      }
    }
  }
  if (opts.output == "json") {
    ordered_json j;
    j["method"] = "fft";
    j["rate_hz"] = est.rate_hz;
    j["n_fft"] = est.n_fft;
    j["bin_hz"] = est.bin_hz;
    std::cout << j.dump(2) << "\n";
  } else {
    std::printf("rate_hz: %.4f\n", est.rate_hz);
    std::printf("n_fft: %d (bin width %.4f Hz)\n", est.n_fft, est.bin_hz);
  }
  return 0;
}

int run_synth(const evrate::SynthSpec& spec, const std::string& out_path,
              const std::string& format) {
  const evrate::EventStream stream = evrate::generate(spec);
  evrate::write_events(stream, out_path,
                       format == "text" ? evrate::FileFormat::text : evrate::FileFormat::binary);
  std::fprintf(stderr, "wrote %zu events to %s\n", stream.size(), out_path.c_str());
  return 0;
}

std::vector<int64_t> parse_sweep_values(const std::string& arg) {
  std::vector<int64_t> values;
  std::string token;
  std::istringstream is(arg);
  while (std::getline(is, token, ',')) {
    if (!token.empty()) values.push_back(std::stoll(token));
  }
  if (values.empty()) throw evrate::Error(evrate::Errc::invalid_spec, "empty sweep list");
  return values;
}

int run_bench(const std::string& manifest, const std::vector<std::string>& sweep_args,
              const std::string& out_path, const GlobalOpts& opts) {
  std::vector<evrate::Scenario> scenarios = evrate::load_manifest(manifest);

  std::vector<int> sweep_w;
  std::vector<int64_t> sweep_n;
  for (const auto& arg : sweep_args) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos) {
      throw evrate::Error(evrate::Errc::invalid_spec, "sweep wants W=... or N=...: " + arg);
    }
    const std::string key = arg.substr(0, eq);
    const auto values = parse_sweep_values(arg.substr(eq + 1));
    if (key == "W") {
      for (int64_t v : values) sweep_w.push_back(static_cast<int>(v));
    } else if (key == "N") {
      sweep_n = values;
    } else {
      throw evrate::Error(evrate::Errc::invalid_spec, "unknown sweep key: " + key);
    }
  }

  std::ofstream file_out;
  const bool to_file = !out_path.empty();
  if (to_file) {
    file_out.open(out_path, std::ios::trunc);
    if (!file_out) throw evrate::Error(evrate::Errc::io_error, "cannot open " + out_path);
  }

  if (!sweep_w.empty() || !sweep_n.empty()) {
    if (sweep_w.empty()) sweep_w = {45};
    if (sweep_n.empty()) sweep_n = {1800};
    const auto cells = evrate::sweep(sweep_w, sweep_n, scenarios, opts.threads);
    if (to_file) evrate::write_sweep_csv(cells, file_out);
    if (opts.output == "csv" && !to_file) evrate::write_sweep_csv(cells, std::cout);
    else std::cout << evrate::format_sweep_table(cells);
    return 0;
  }

  const evrate::BenchReport report = evrate::run_suite(scenarios, opts.threads);
  if (to_file) evrate::write_report_csv(report, file_out);
  if (opts.output == "csv" && !to_file) evrate::write_report_csv(report, std::cout);
  else std::cout << evrate::format_report_table(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rate estimation for periodic phenomena captured by event cameras"};
  app.require_subcommand(1);

  GlobalOpts opts;
  app.add_option("--format", opts.format, "Input file format: auto, text, binary")
      ->check(CLI::IsMember({"auto", "text", "binary"}));
  app.add_option("--output", opts.output, "Report format: text, json, csv")
      ->check(CLI::IsMember({"text", "json", "csv"}));
  app.add_option("--roi", opts.roi, "Region of interest: X Y WIDTH HEIGHT")->expected(4);
  app.add_option("--start-us", opts.start_us, "Segment start, microseconds");
  app.add_option("--duration-us", opts.duration_us, "Segment length, microseconds (default 1s)");
  app.add_option("--threads", opts.threads, "Worker threads for windows/scenarios")
      ->check(CLI::PositiveNumber);
  app.add_flag("--strict-order", opts.strict_order, "Reject unsorted binary inputs");

  // estimate
  auto* cmd_est = app.add_subcommand("estimate", "Correlation-based rate estimate");
  std::string est_input;
  evrate::EstimateConfig est_cfg;
  std::string est_method = "auto";
  cmd_est->add_option("input", est_input, "Event stream file")->required();
  cmd_est->add_option("-W,--window", est_cfg.window_px, "Window size, px");
  cmd_est->add_option("-N,--template-events", est_cfg.template_events,
                      "Template event count threshold");
  cmd_est->add_option("--t-quant", est_cfg.t_quant_us, "Quantization bin, microseconds");
  cmd_est->add_option("--min-prominence", est_cfg.peaks.min_prominence,
                      "Peak prominence threshold, fraction of response range");
  cmd_est->add_option("--min-separation", est_cfg.peaks.min_separation_bins,
                      "Minimum peak separation, bins");
  cmd_est->add_option("--max-template-fraction", est_cfg.max_template_fraction,
                      "Depth cap as a fraction of the stream depth");
  cmd_est->add_option("--method", est_method, "Correlation path: auto, direct, fft")
      ->check(CLI::IsMember({"auto", "direct", "fft"}));

  // baseline simple|fft
  auto* cmd_base = app.add_subcommand("baseline", "Reference baseline methods");
  cmd_base->require_subcommand(1);
  auto* cmd_simple = cmd_base->add_subcommand("simple", "Per-pixel temporal medians");
  std::string simple_input;
  int simple_window = 45;
  cmd_simple->add_option("input", simple_input, "Event stream file")->required();
  cmd_simple->add_option("-W,--window", simple_window, "Window size, px");

  auto* cmd_fft = cmd_base->add_subcommand("fft", "Per-pixel Fourier analysis");
  std::string fft_input, fft_polarity = "negative", fft_map_path;
  evrate::FftBaselineConfig fft_cfg;
  cmd_fft->add_option("input", fft_input, "Event stream file")->required();
  cmd_fft->add_option("--polarity", fft_polarity, "Polarity to analyse: positive, negative")
      ->check(CLI::IsMember({"positive", "negative"}));
  cmd_fft->add_option("--bin-us", fft_cfg.bin_us, "Impulse sampling bin, microseconds")
      ->check(CLI::PositiveNumber);
  cmd_fft->add_option("--n-fft", fft_cfg.n_fft, "Transform length (0 = auto)")
      ->check(CLI::Range(2, 1 << 26) | CLI::IsMember({0}));
  cmd_fft->add_option("--rate-map", fft_map_path, "Write per-pixel rates to CSV");

  // synth
  auto* cmd_synth = app.add_subcommand("synth", "Generate a synthetic event stream");
  evrate::SynthSpec spec;
  std::string synth_kind, synth_out, synth_format = "binary";
  std::vector<int> synth_region;
  cmd_synth->add_option("kind", synth_kind,
                        "flash, rotating-line, rotating-dot, vibrating-edge, translating-pattern")
      ->required();
  cmd_synth->add_option("--rate", spec.rate_hz, "Ground-truth rate, Hz")->required();
  cmd_synth->add_option("--duration", spec.duration_us, "Duration, microseconds")->required();
  cmd_synth->add_option("--width", spec.width, "Sensor width, px")->required();
  cmd_synth->add_option("--height", spec.height, "Sensor height, px")->required();
  cmd_synth->add_option("--region", synth_region, "Active region: X Y WIDTH HEIGHT")->expected(4);
  cmd_synth->add_option("--duty", spec.duty, "Flash duty cycle");
  cmd_synth->add_option("--center-x", spec.center_x, "Rotation center x");
  cmd_synth->add_option("--center-y", spec.center_y, "Rotation center y");
  cmd_synth->add_option("--radius", spec.radius, "Line length / orbit radius, px");
  cmd_synth->add_option("--dot-radius", spec.dot_radius, "Dot radius, px");
  cmd_synth->add_option("--amplitude", spec.amplitude, "Edge oscillation amplitude, px");
  cmd_synth->add_option("--edge-y", spec.edge_y, "Edge rest row");
  cmd_synth->add_option("--pitch", spec.pattern_pitch_px, "Pattern pitch, px");
  cmd_synth->add_option("--sample-dt", spec.sample_dt_us, "Feature sampling step, microseconds");
  cmd_synth->add_option("--jitter-us", spec.jitter_us, "Gaussian timestamp jitter std");
  cmd_synth->add_option("--noise-rate", spec.noise_rate, "Background events / pixel / second");
  cmd_synth->add_option("--seed", spec.seed, "RNG seed");
  cmd_synth->add_option("-o,--out", synth_out, "Output file")->required();
  cmd_synth->add_option("--out-format", synth_format, "binary or text")
      ->check(CLI::IsMember({"binary", "text"}));

  // bench
  auto* cmd_bench = app.add_subcommand("bench", "Run a benchmark manifest");
  std::string bench_manifest, bench_out;
  std::vector<std::string> bench_sweep;
  cmd_bench->add_option("--manifest", bench_manifest, "Scenario manifest (JSON)")->required();
  cmd_bench->add_option("--sweep", bench_sweep,
                        "Parameter sweep, e.g. --sweep W=30,45,60,75 N=1800")
      ->expected(-1);
  cmd_bench->add_option("-o,--out", bench_out, "Write report CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (cmd_est->parsed()) {
      est_cfg.method = est_method == "direct" ? evrate::CorrelationMethod::direct
                       : est_method == "fft"  ? evrate::CorrelationMethod::fft
                                              : evrate::CorrelationMethod::automatic;
      return run_estimate(est_input, opts, est_cfg);
    }
    if (cmd_simple->parsed()) return run_simple(simple_input, opts, simple_window);
    if (cmd_fft->parsed()) {
      fft_cfg.negative_polarity = fft_polarity == "negative";
      return run_fft(fft_input, opts, fft_cfg, fft_map_path);
    }
    if (cmd_synth->parsed()) {
      spec.kind = evrate::synth_kind_from_name(synth_kind);
      if (!synth_region.empty()) {
        spec.region = {synth_region[0], synth_region[1], synth_region[2], synth_region[3]};
      }
      return run_synth(spec, synth_out, synth_format);
    }
    if (cmd_bench->parsed()) return run_bench(bench_manifest, bench_sweep, bench_out, opts);
  } catch (const evrate::Error& e) {
    const int rc = exit_code_for(e);
    if (rc == 2) {
      std::cerr << "evrate: no valid windows: " << e.what() << "\n";
    } else {
      std::cerr << "evrate: error: " << e.what() << " [" << evrate::errc_name(e.code()) << "]\n";
    }
    return rc;
  } catch (const std::exception& e) {
    std::cerr << "evrate: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
