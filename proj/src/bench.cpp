#include "evrate/bench.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "evrate/io.hpp"
#include "parallel.hpp"

namespace evrate {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

std::string canonical_method(const std::string& name) {
  if (name == "correlation" || name == "corr" || name == "eeppr") return "correlation";
  if (name == "simple") return "simple";
  if (name == "fft") return "fft";
  throw Error(Errc::invalid_spec, "unknown method: " + name);
}

Roi roi_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw Error(Errc::invalid_spec, "roi must be [x, y, width, height]");
  }
  return Roi{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

SynthSpec synth_from_json(const json& j) {
  SynthSpec s;
  s.kind = synth_kind_from_name(j.at("kind").get<std::string>());
  s.rate_hz = j.at("rate_hz").get<double>();
  s.duration_us = j.at("duration_us").get<int64_t>();
  s.width = j.at("width").get<uint16_t>();
  s.height = j.at("height").get<uint16_t>();
  if (j.contains("region")) s.region = roi_from_json(j["region"]);
  s.duty = j.value("duty", s.duty);
  s.center_x = j.value("center_x", s.center_x);
  s.center_y = j.value("center_y", s.center_y);
  s.radius = j.value("radius", s.radius);
  s.dot_radius = j.value("dot_radius", s.dot_radius);
  s.amplitude = j.value("amplitude", s.amplitude);
  s.edge_y = j.value("edge_y", s.edge_y);
  s.pattern_pitch_px = j.value("pattern_pitch_px", s.pattern_pitch_px);
  s.sample_dt_us = j.value("sample_dt_us", s.sample_dt_us);
  s.jitter_us = j.value("jitter_us", s.jitter_us);
  s.noise_rate = j.value("noise_rate", s.noise_rate);
  s.seed = j.value("seed", s.seed);
  return s;
}

EstimateConfig estimate_config_from_json(const json& j, EstimateConfig base) {
  base.window_px = j.value("window_px", base.window_px);
  base.template_events = j.value("template_events", base.template_events);
  base.t_quant_us = j.value("t_quant_us", base.t_quant_us);
  base.peaks.min_prominence = j.value("min_prominence", base.peaks.min_prominence);
  base.peaks.min_separation_bins = j.value("min_separation_bins", base.peaks.min_separation_bins);
  base.max_template_fraction = j.value("max_template_fraction", base.max_template_fraction);
  if (j.contains("method")) {
    const auto m = j["method"].get<std::string>();
    if (m == "auto") base.method = CorrelationMethod::automatic;
    else if (m == "direct") base.method = CorrelationMethod::direct;
    else if (m == "fft") base.method = CorrelationMethod::fft;
    else throw Error(Errc::invalid_spec, "unknown correlation method: " + m);
  }
  base.threads = j.value("threads", base.threads);
  return base;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(precision);
  os << v;
  return os.str();
}

}  // namespace

double relative_error_pct(double estimate_hz, double gt_hz) {
  return std::abs(estimate_hz - gt_hz) / gt_hz * 100.0;
}

EventStream slice_stream(const EventStream& stream, int64_t start_us, int64_t duration_us) {
  if (start_us < 0 || duration_us < 1) {
    throw Error(Errc::invalid_spec, "slice needs start >= 0 and duration >= 1");
  }
  EventStream out;
  out.width = stream.width;
  out.height = stream.height;
  for (const Event& e : stream.events) {
    if (e.t < start_us) continue;
    if (e.t >= start_us + duration_us) break;
    Event shifted = e;
    shifted.t -= start_us;
    out.events.push_back(shifted);
  }
  out.duration_us = std::clamp<int64_t>(stream.duration_us - start_us, 0, duration_us);
  if (!out.events.empty()) {
    out.duration_us = std::max(out.duration_us, out.events.back().t + 1);
  }
  return out;
}

std::vector<BenchRow> run_scenario(const Scenario& scenario) {
  std::vector<BenchRow> rows;
  rows.reserve(scenario.methods.size());
  for (const auto& m : scenario.methods) {
    BenchRow row;
    row.scenario_id = scenario.id;
    row.method = canonical_method(m);
    row.gt_hz = scenario.gt_rate_hz;
    rows.push_back(std::move(row));
  }

  EventStream stream;
  try {
    if (scenario.source) {
      if (!std::filesystem::exists(*scenario.source)) {
        for (auto& row : rows) row.status = "skipped: file not found: " + scenario.source->string();
        return rows;
      }
      stream = read_events(*scenario.source);
    } else if (scenario.synth) {
      stream = generate(*scenario.synth);
    } else {
      throw Error(Errc::invalid_spec, "scenario has neither source nor synth");
    }
    stream = slice_stream(stream, 0, scenario.segment_us);
  } catch (const Error& e) {
    for (auto& row : rows) row.status = std::string("failed: ") + e.what();
    return rows;
  }

  for (auto& row : rows) {
    const auto t0 = Clock::now();
    try {
      if (row.method == "correlation") {
        const RateEstimate est = estimate(stream, scenario.correlation, scenario.roi);
        row.estimate_hz = est.rate_hz;
        row.accepted_windows = est.accepted_windows;
        row.total_windows = static_cast<int>(est.windows.size());
      } else if (row.method == "simple") {
        const SimpleBaselineResult est =
            simple_baseline(stream, scenario.simple_window_px, scenario.roi);
        row.estimate_hz = est.rate_hz;
        row.accepted_windows = static_cast<int>(est.window_rates.size());
      } else {
        const FftBaselineResult est = fft_baseline(stream, scenario.fft, scenario.roi);
        row.estimate_hz = est.rate_hz;
      }
      row.relative_error_pct = relative_error_pct(row.estimate_hz, row.gt_hz);
    } catch (const Error& e) {
      row.status = std::string("failed: ") + e.what();
    }
    row.runtime_ms =
        std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  }
  return rows;
}

BenchReport run_suite(const std::vector<Scenario>& scenarios, int threads) {
  std::vector<std::vector<BenchRow>> per_scenario(scenarios.size());
  detail::parallel_for(scenarios.size(), threads,
                       [&](int, size_t i) { per_scenario[i] = run_scenario(scenarios[i]); });

  BenchReport report;
  for (auto& rows : per_scenario) {
    for (auto& row : rows) report.rows.push_back(std::move(row));
  }

  std::map<std::string, MethodSummary> summaries;
  for (const auto& row : report.rows) {
    if (!row.ok()) continue;
    auto& s = summaries[row.method];
    s.method = row.method;
    s.mean_relative_error_pct += row.relative_error_pct;
    s.max_relative_error_pct = std::max(s.max_relative_error_pct, row.relative_error_pct);
    ++s.rows;
  }
  for (auto& [_, s] : summaries) {
    if (s.rows > 0) s.mean_relative_error_pct /= s.rows;
    report.summaries.push_back(s);
  }
  return report;
}

std::vector<SweepCell> sweep(const std::vector<int>& window_sizes,
                             const std::vector<int64_t>& template_counts,
                             const std::vector<Scenario>& scenarios, int threads) {
  if (window_sizes.empty() || template_counts.empty()) {
    throw Error(Errc::invalid_spec, "sweep grid must be non-empty");
  }
  std::vector<SweepCell> cells;
  for (int w : window_sizes) {
    for (int64_t n : template_counts) {
      std::vector<Scenario> grid_scenarios = scenarios;
      for (auto& s : grid_scenarios) {
        s.methods = {"correlation"};
        s.correlation.window_px = w;
        s.correlation.template_events = n;
      }
      const BenchReport report = run_suite(grid_scenarios, threads);
      SweepCell cell;
      cell.window_px = w;
      cell.template_events = n;
      for (const auto& row : report.rows) {
        if (!row.ok()) {
          ++cell.failures;
          continue;
        }
        cell.mean_relative_error_pct += row.relative_error_pct;
        cell.max_relative_error_pct = std::max(cell.max_relative_error_pct, row.relative_error_pct);
        ++cell.rows;
      }
      if (cell.rows > 0) cell.mean_relative_error_pct /= cell.rows;
      cells.push_back(cell);
    }
  }
  return cells;
}

std::vector<Scenario> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open manifest " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, "manifest " + path.string() + ": " + e.what());
  }
  try {
    std::vector<Scenario> scenarios;
    for (const auto& j : doc.at("scenarios")) {
      Scenario s;
      s.id = j.value("id", "scenario-" + std::to_string(scenarios.size()));
      if (j.contains("source")) s.source = j["source"].get<std::string>();
      if (j.contains("synth")) s.synth = synth_from_json(j["synth"]);
      s.gt_rate_hz = j.at("gt_rate_hz").get<double>();
      s.segment_us = j.value("segment_us", s.segment_us);
      if (j.contains("methods")) {
        s.methods.clear();
        for (const auto& m : j["methods"]) s.methods.push_back(canonical_method(m.get<std::string>()));
      }
      if (j.contains("roi")) s.roi = roi_from_json(j["roi"]);
      if (j.contains("overrides")) {
        const auto& o = j["overrides"];
        if (o.contains("correlation")) {
          s.correlation = estimate_config_from_json(o["correlation"], s.correlation);
        } else if (o.contains("eeppr")) {
          s.correlation = estimate_config_from_json(o["eeppr"], s.correlation);
        }
        if (o.contains("simple")) {
          s.simple_window_px = o["simple"].value("window_px", s.simple_window_px);
        }
        if (o.contains("fft")) {
          const auto& f = o["fft"];
          if (f.contains("polarity")) {
            const auto p = f["polarity"].get<std::string>();
            if (p == "negative") s.fft.negative_polarity = true;
            else if (p == "positive") s.fft.negative_polarity = false;
            else throw Error(Errc::invalid_spec, "polarity must be positive or negative");
          }
          s.fft.bin_us = f.value("bin_us", s.fft.bin_us);
          s.fft.n_fft = f.value("n_fft", s.fft.n_fft);
        }
      }
      if (!(s.gt_rate_hz > 0)) throw Error(Errc::invalid_spec, "gt_rate_hz must be positive");
      scenarios.push_back(std::move(s));
    }
    return scenarios;
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, "manifest " + path.string() + ": " + e.what());
  }
}

void write_report_csv(const BenchReport& report, std::ostream& out) {
  out << "scenario,method,gt_hz,estimate_hz,relative_error_pct,runtime_ms,"
         "accepted_windows,total_windows,status\n";
  for (const auto& r : report.rows) {
    out << csv_field(r.scenario_id) << ',' << r.method << ',' << fmt(r.gt_hz) << ','
        << (r.ok() ? fmt(r.estimate_hz) : "") << ','
        << (r.ok() ? fmt(r.relative_error_pct) : "") << ',' << fmt(r.runtime_ms, 2) << ','
        << r.accepted_windows << ',' << r.total_windows << ',' << csv_field(r.status) << '\n';
  }
}

std::string format_report_table(const BenchReport& report) {
  std::ostringstream os;
  os << "scenario              method       gt_hz      estimate_hz  rel_err_%  runtime_ms  status\n";
  for (const auto& r : report.rows) {
    char line[256];
    std::snprintf(line, sizeof line, "%-21s %-12s %-10.3f %-12.4f %-10.4f %-11.2f %s\n",
                  r.scenario_id.c_str(), r.method.c_str(), r.gt_hz,
                  r.ok() ? r.estimate_hz : 0.0, r.ok() ? r.relative_error_pct : 0.0,
                  r.runtime_ms, r.status.c_str());
    os << line;
  }
  for (const auto& s : report.summaries) {
    char line[256];
    std::snprintf(line, sizeof line, "summary %-12s rows=%-4d mean_rel_err=%.4f%% max_rel_err=%.4f%%\n",
                  s.method.c_str(), s.rows, s.mean_relative_error_pct, s.max_relative_error_pct);
    os << line;
  }
  return os.str();
}

void write_sweep_csv(const std::vector<SweepCell>& cells, std::ostream& out) {
  out << "window_px,template_events,rows,failures,mean_relative_error_pct,max_relative_error_pct\n";
  for (const auto& c : cells) {
    out << c.window_px << ',' << c.template_events << ',' << c.rows << ',' << c.failures << ','
        << fmt(c.mean_relative_error_pct) << ',' << fmt(c.max_relative_error_pct) << '\n';
  }
}

std::string format_sweep_table(const std::vector<SweepCell>& cells) {
  std::ostringstream os;
  os << "W      N        rows  fail  mean_rel_err_%  max_rel_err_%\n";
  for (const auto& c : cells) {
    char line[160];
    std::snprintf(line, sizeof line, "%-6d %-8lld %-5d %-5d %-15.4f %-14.4f\n", c.window_px,
                  static_cast<long long>(c.template_events), c.rows, c.failures,
                  c.mean_relative_error_pct, c.max_relative_error_pct);
    os << line;
  }
  return os.str();
}

}  // namespace evrate
