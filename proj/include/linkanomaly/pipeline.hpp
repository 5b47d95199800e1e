#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "linkanomaly/aggregate.hpp"
#include "linkanomaly/burst.hpp"
#include "linkanomaly/dto.hpp"
#include "linkanomaly/mention_model.hpp"
#include "linkanomaly/sdnml.hpp"

// End-to-end wiring: per-post anomaly scores -> windowed series -> the two
// detectors (adaptive-threshold change points on a coarse grid, burst decode
// on a fine grid), plus result emission. Everything here is deterministic
// given the input stream and configuration.
namespace linkanomaly {

struct PipelineConfig {
  MentionModelParams model;
  double history_window = UserHistory::kDefaultWindowSeconds;
  double order_slack = 0.0;

  double tau_changepoint = 60.0;
  double tau_burst = 1.0;
  // Left edge of window 0. Unset: the first post's time floored to the grid.
  std::optional<double> origin;

  TwoLayerConfig scoring;
  DtoConfig dto;
  std::size_t dto_warmup = 100;
  // Fixed histogram range; unset means calibrate from the warm-up scores.
  std::optional<double> dto_lower;
  std::optional<double> dto_upper;

  BurstConfig burst;
  // Event filter threshold. Unset: filter_percentile of the nonzero values
  // among the first burst_warmup_windows fine-grid windows.
  std::optional<double> filter_threshold;
  double filter_percentile = 0.9;
  std::size_t burst_warmup_windows = 3600;

  bool changepoint_enabled = true;
  bool burst_enabled = true;

  // Echoed into outputs; consumed by the synthetic generator.
  std::uint64_t seed = 42;

  void validate() const;
};

// One row of the per-post score log, in stream order.
struct ScoreRow {
  double time = 0.0;
  std::string user;
  std::size_t mention_count = 0;
  double score = 0.0;
};

// One scored window on the change-point grid. threshold is empty while the
// adaptive histogram is still calibrating (no alarms possible there).
struct ChangepointRow {
  std::size_t window = 0;
  double window_start = 0.0;
  double score = 0.0;
  std::optional<double> threshold;
  bool alarm = false;
};

struct ChangepointResult {
  bool sufficient = false;
  ChangeScoreSeries series;
  std::vector<ChangepointRow> rows;
  std::vector<std::size_t> alarm_windows;
  std::vector<double> alarm_times;
};

struct BurstResult {
  bool sufficient = false;
  double filter_threshold = 0.0;
  std::vector<double> event_times;
  BurstPath path;
};

struct RunArtifacts {
  PipelineConfig config;
  std::vector<ScoreRow> post_scores;
  std::size_t distinct_users = 0;
  ScoreSeries aggregated;       // change-point grid
  ScoreSeries aggregated_fine;  // burst grid
  std::optional<ChangepointResult> changepoint;  // empty when disabled
  std::optional<BurstResult> burst;              // empty when disabled

  // True when every enabled detector produced output.
  bool sufficient() const;
};

// Scores a time-ordered stream and runs the enabled detectors. Throws
// StreamOrderError for posts out of order beyond the slack and ParseError /
// std::invalid_argument for malformed values. Pass a diagnostics vector to
// capture per-step change-point internals.
RunArtifacts run_pipeline(const std::vector<Post>& posts, const PipelineConfig& cfg,
                          std::vector<SdnmlDiagnosticRow>* sdnml_diagnostics = nullptr);

// Re-runs only the threshold stage per tail mass, reusing the already
// computed change-point scores. Requires artifacts with a change-point stage.
struct SweepRow {
  double rho = 0.0;
  std::size_t detections = 0;
  std::optional<double> first_detection_time;
};
std::vector<SweepRow> sweep_rho(const RunArtifacts& artifacts,
                                std::span<const double> rhos);

// The run summary as a JSON document (counts, detections, first detection
// times, parameters echoed).
std::string summary_json(const RunArtifacts& artifacts);

// Writes scores.csv, aggregated.csv, changepoints.csv, bursts.csv and
// summary.json into out_dir (created if missing). Byte-identical for
// identical artifacts. Throws std::runtime_error on write failure.
void emit_results(const RunArtifacts& artifacts, const std::filesystem::path& out_dir);

// Diagnostic dump of per-step change-point internals as CSV.
void write_sdnml_diagnostics(std::span<const SdnmlDiagnosticRow> rows,
                             const std::filesystem::path& path);

}  // namespace linkanomaly
