#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "evrate/baselines.hpp"
#include "evrate/estimate.hpp"
#include "evrate/synth.hpp"

namespace evrate {

/// One benchmark case: an event source (file or generator), its ground-truth
/// rate, and the methods to run on a leading segment of the stream.
struct Scenario {
  std::string id;
  std::optional<std::filesystem::path> source;  // file path, or
  std::optional<SynthSpec> synth;               // generator spec
  double gt_rate_hz = 0;
  int64_t segment_us = 1'000'000;
  std::vector<std::string> methods{"correlation"};  // correlation | simple | fft
  std::optional<Roi> roi;

  EstimateConfig correlation{};
  int simple_window_px = 45;
  FftBaselineConfig fft{};
};

struct BenchRow {
  std::string scenario_id;
  std::string method;
  double gt_hz = 0;
  double estimate_hz = 0;
  double relative_error_pct = 0;
  double runtime_ms = 0;
  int accepted_windows = 0;
  int total_windows = 0;
  std::string status = "ok";  // ok | failed: ... | skipped: ...

  bool ok() const { return status == "ok"; }
};

struct MethodSummary {
  std::string method;
  int rows = 0;
  double mean_relative_error_pct = 0;
  double max_relative_error_pct = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<MethodSummary> summaries;  // over rows with status ok
};

double relative_error_pct(double estimate_hz, double gt_hz);

/// Copies events with t in [start_us, start_us + duration_us), rebased to
/// t = 0. Events at or past the cut never influence downstream estimates.
EventStream slice_stream(const EventStream& stream, int64_t start_us, int64_t duration_us);

/// Loads or generates the stream, truncates it to the leading segment and
/// runs each requested method. Method failures become failed rows; a missing
/// source file yields skipped rows. Runtimes exclude I/O and generation.
std::vector<BenchRow> run_scenario(const Scenario& scenario);

/// Runs scenarios (in parallel up to `threads`) and summarizes per method.
/// Row order follows the scenario list regardless of completion order.
BenchReport run_suite(const std::vector<Scenario>& scenarios, int threads = 1);

struct SweepCell {
  int window_px = 0;
  int64_t template_events = 0;
  int rows = 0;
  int failures = 0;
  double mean_relative_error_pct = 0;
  double max_relative_error_pct = 0;
};

/// Re-runs the correlation method over every (W, N) grid cell on every
/// scenario. Failed rows count into `failures` and are excluded from the
/// error statistics.
std::vector<SweepCell> sweep(const std::vector<int>& window_sizes,
                             const std::vector<int64_t>& template_counts,
                             const std::vector<Scenario>& scenarios, int threads = 1);

/// JSON manifest: {"scenarios": [{id, source|synth, gt_rate_hz, segment_us,
/// methods, roi, overrides...}]}. See README for the full schema.
std::vector<Scenario> load_manifest(const std::filesystem::path& path);

void write_report_csv(const BenchReport& report, std::ostream& out);
std::string format_report_table(const BenchReport& report);
void write_sweep_csv(const std::vector<SweepCell>& cells, std::ostream& out);
std::string format_sweep_table(const std::vector<SweepCell>& cells);

}  // namespace evrate
