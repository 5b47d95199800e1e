#include "linkanomaly/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

#include "linkanomaly/errors.hpp"
#include "linkanomaly/io.hpp"
#include "linkanomaly/random.hpp"

namespace linkanomaly {

void PipelineConfig::validate() const {
  model.validate();
  if (!(history_window > 0.0))
    throw std::invalid_argument("history window must be positive");
  if (order_slack < 0.0) throw std::invalid_argument("order slack must be >= 0");
  if (!(tau_changepoint > 0.0) || !(tau_burst > 0.0))
    throw std::invalid_argument("aggregation windows must be positive");
  scoring.validate();
  dto.validate();
  if (dto_lower.has_value() != dto_upper.has_value())
    throw std::invalid_argument("fix both histogram edges or neither");
  if (dto_lower && !(*dto_lower < *dto_upper))
    throw std::invalid_argument("histogram range requires lower < upper");
  if (!dto_lower && dto_warmup == 0)
    throw std::invalid_argument("range calibration needs at least one warm-up score");
  burst.validate();
  if (!(filter_percentile > 0.0) || filter_percentile > 1.0)
    throw std::invalid_argument("filter percentile must lie in (0, 1]");
}

bool RunArtifacts::sufficient() const {
  if (changepoint && !changepoint->sufficient) return false;
  if (burst && !burst->sufficient) return false;
  return changepoint.has_value() || burst.has_value();
}

namespace {

ChangepointResult run_changepoint_stage(const ScoreSeries& series,
                                        const PipelineConfig& cfg,
                                        std::vector<SdnmlDiagnosticRow>* diagnostics) {
  ChangepointResult out;
  out.series = two_layer_score(series.values, cfg.scoring, diagnostics);
  if (!out.series.sufficient) return out;
  out.sufficient = true;

  DtoDetector detector(cfg.dto, cfg.dto_warmup, cfg.dto_lower, cfg.dto_upper);
  for (std::size_t i = 0; i < out.series.scores.size(); ++i) {
    const auto decision = detector.step(out.series.scores[i]);
    ChangepointRow row;
    row.window = out.series.score_index[i];
    row.window_start = series.window_start(row.window);
    row.score = out.series.scores[i];
    row.threshold = decision.threshold;
    row.alarm = decision.alarm;
    if (row.alarm) {
      out.alarm_windows.push_back(row.window);
      out.alarm_times.push_back(row.window_start);
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

BurstResult run_burst_stage(const ScoreSeries& series, const PipelineConfig& cfg) {
  BurstResult out;
  if (cfg.filter_threshold) {
    out.filter_threshold = *cfg.filter_threshold;
  } else {
    // Calibrate the filter on the leading stretch of the fine grid; empty
    // windows carry no information and are excluded from the percentile.
    const std::size_t prefix =
        std::min(cfg.burst_warmup_windows, series.values.size());
    std::vector<double> nonzero;
    for (std::size_t j = 0; j < prefix; ++j) {
      if (series.values[j] > 0.0) nonzero.push_back(series.values[j]);
    }
    out.filter_threshold = nonzero.empty()
                               ? std::numeric_limits<double>::infinity()
                               : nearest_rank_percentile(std::move(nonzero),
                                                         cfg.filter_percentile);
  }
  out.event_times = filter_events(series, out.filter_threshold);
  out.path = burst_viterbi(out.event_times, cfg.burst);
  out.sufficient = !out.path.states.empty();
  return out;
}

}  // namespace

RunArtifacts run_pipeline(const std::vector<Post>& posts, const PipelineConfig& cfg,
                          std::vector<SdnmlDiagnosticRow>* sdnml_diagnostics) {
  cfg.validate();
  RunArtifacts artifacts;
  artifacts.config = cfg;

  double origin_cp = 0.0;
  double origin_fine = 0.0;
  if (!posts.empty()) {
    const double first = posts.front().time;
    origin_cp = cfg.origin.value_or(
        std::floor(first / cfg.tau_changepoint) * cfg.tau_changepoint);
    origin_fine =
        cfg.origin.value_or(std::floor(first / cfg.tau_burst) * cfg.tau_burst);
  }
  ScoreAggregator agg_cp(cfg.tau_changepoint, origin_cp, cfg.order_slack);
  ScoreAggregator agg_fine(cfg.tau_burst, origin_fine, cfg.order_slack);

  std::unordered_map<std::string, UserHistory> histories;
  double newest = -std::numeric_limits<double>::infinity();
  artifacts.post_scores.reserve(posts.size());
  for (const Post& post : posts) {
    if (!std::isfinite(post.time))
      throw std::invalid_argument("post time must be finite");
    if (post.time + cfg.order_slack < newest) {
      throw StreamOrderError("post at t=" + std::to_string(post.time) +
                             " arrives more than the slack behind the stream");
    }
    if (post.time > newest) newest = post.time;

    auto [it, created] = histories.try_emplace(
        post.user, UserHistory(cfg.history_window, cfg.order_slack));
    UserHistory& history = it->second;

    // Score against the history as it stood before this post, then train.
    const double score = link_anomaly_score(post, history, cfg.model);
    history.add(post, post.time);

    artifacts.post_scores.push_back(
        ScoreRow{post.time, post.user, post.mention_count(), score});
    agg_cp.add(post.time, score);
    agg_fine.add(post.time, score);
  }
  artifacts.distinct_users = histories.size();
  artifacts.aggregated = std::move(agg_cp).finish();
  artifacts.aggregated_fine = std::move(agg_fine).finish();

  if (cfg.changepoint_enabled) {
    artifacts.changepoint =
        run_changepoint_stage(artifacts.aggregated, cfg, sdnml_diagnostics);
  }
  if (cfg.burst_enabled) {
    artifacts.burst = run_burst_stage(artifacts.aggregated_fine, cfg);
  }
  return artifacts;
}

std::vector<SweepRow> sweep_rho(const RunArtifacts& artifacts,
                                std::span<const double> rhos) {
  if (!artifacts.changepoint)
    throw std::invalid_argument("sweep needs a change-point stage in the artifacts");
  std::vector<SweepRow> out;
  const ChangeScoreSeries& series = artifacts.changepoint->series;
  for (const double rho : rhos) {
    DtoConfig dto = artifacts.config.dto;
    dto.rho = rho;
    SweepRow row;
    row.rho = rho;
    if (series.sufficient) {
      DtoDetector detector(dto, artifacts.config.dto_warmup,
                           artifacts.config.dto_lower, artifacts.config.dto_upper);
      for (std::size_t i = 0; i < series.scores.size(); ++i) {
        if (detector.step(series.scores[i]).alarm) {
          ++row.detections;
          if (!row.first_detection_time) {
            row.first_detection_time =
                artifacts.aggregated.window_start(series.score_index[i]);
          }
        }
      }
    }
    out.push_back(row);
  }
  return out;
}

namespace {

nlohmann::json optional_number(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

nlohmann::json parameters_json(const PipelineConfig& cfg) {
  nlohmann::json p;
  p["alpha"] = cfg.model.alpha;
  p["beta"] = cfg.model.beta;
  p["gamma"] = cfg.model.gamma;
  p["history_window"] = cfg.history_window;
  p["order_slack"] = cfg.order_slack;
  p["tau_changepoint"] = cfg.tau_changepoint;
  p["tau_burst"] = cfg.tau_burst;
  p["origin"] = optional_number(cfg.origin);
  p["ar_order_first"] = cfg.scoring.first.order;
  p["ar_order_second"] = cfg.scoring.second.order;
  p["discount_first"] = cfg.scoring.first.discount;
  p["discount_second"] = cfg.scoring.second.discount;
  p["warmup_margin_first"] = cfg.scoring.first.warmup_margin;
  p["warmup_margin_second"] = cfg.scoring.second.warmup_margin;
  p["ridge"] = cfg.scoring.first.ridge;
  p["variance_floor"] = cfg.scoring.first.variance_floor;
  p["kappa"] = cfg.scoring.kappa;
  p["dto_bins"] = cfg.dto.bins;
  p["rho"] = cfg.dto.rho;
  p["dto_smoothing"] = cfg.dto.smoothing;
  p["dto_discount"] = cfg.dto.discount;
  p["dto_warmup"] = cfg.dto_warmup;
  p["dto_lower"] = optional_number(cfg.dto_lower);
  p["dto_upper"] = optional_number(cfg.dto_upper);
  p["quiet_rate"] = cfg.burst.quiet_rate;
  p["burst_rate"] = cfg.burst.burst_rate;
  p["switch_prob"] = cfg.burst.switch_prob;
  p["filter_threshold"] = optional_number(cfg.filter_threshold);
  p["filter_percentile"] = cfg.filter_percentile;
  p["burst_warmup_windows"] = cfg.burst_warmup_windows;
  p["changepoint_enabled"] = cfg.changepoint_enabled;
  p["burst_enabled"] = cfg.burst_enabled;
  p["seed"] = cfg.seed;
  return p;
}

nlohmann::json build_summary(const RunArtifacts& a) {
  nlohmann::json j;
  j["status"] = a.sufficient() ? "ok" : "insufficient_data";
  j["posts"] = a.post_scores.size();
  j["users"] = a.distinct_users;
  j["parameters"] = parameters_json(a.config);

  nlohmann::json cp;
  if (!a.changepoint) {
    cp["status"] = "disabled";
  } else {
    const ChangepointResult& r = *a.changepoint;
    cp["status"] = r.sufficient ? "ok" : "insufficient_data";
    cp["windows"] = a.aggregated.values.size();
    cp["min_windows_required"] = r.series.min_windows;
    cp["scored_windows"] = r.series.scores.size();
    cp["num_detections"] = r.alarm_times.size();
    cp["first_detection_time"] =
        r.alarm_times.empty() ? nlohmann::json(nullptr)
                              : nlohmann::json(r.alarm_times.front());
  }
  j["changepoint"] = cp;

  nlohmann::json b;
  if (!a.burst) {
    b["status"] = "disabled";
  } else {
    const BurstResult& r = *a.burst;
    b["status"] = r.sufficient ? "ok" : "insufficient_data";
    b["windows"] = a.aggregated_fine.values.size();
    b["events"] = r.event_times.size();
    b["filter_threshold"] = r.filter_threshold;
    b["num_detections"] = r.path.alarm_times.size();
    b["first_detection_time"] =
        r.path.alarm_times.empty() ? nlohmann::json(nullptr)
                                   : nlohmann::json(r.path.alarm_times.front());
  }
  j["burst"] = b;
  return j;
}

// Quotes a CSV field only when it needs it.
std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out.good()) throw std::runtime_error("failed while writing " + path.string());
}

}  // namespace

std::string summary_json(const RunArtifacts& artifacts) {
  return build_summary(artifacts).dump(2) + "\n";
}

void emit_results(const RunArtifacts& a, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  {
    const auto path = out_dir / "scores.csv";
    auto out = open_output(path);
    out << "time,user,k,score\n";
    for (const ScoreRow& row : a.post_scores) {
      out << format_double(row.time) << ',' << csv_escape(row.user) << ','
          << row.mention_count << ',' << format_double(row.score) << '\n';
    }
    finish_output(out, path);
  }

  {
    const auto path = out_dir / "aggregated.csv";
    auto out = open_output(path);
    out << "window_start,s_prime\n";
    for (std::size_t j = 0; j < a.aggregated.values.size(); ++j) {
      out << format_double(a.aggregated.window_start(j)) << ','
          << format_double(a.aggregated.values[j]) << '\n';
    }
    finish_output(out, path);
  }

  {
    const auto path = out_dir / "changepoints.csv";
    auto out = open_output(path);
    out << "window_start,score,threshold,alarm\n";
    if (a.changepoint) {
      for (const ChangepointRow& row : a.changepoint->rows) {
        out << format_double(row.window_start) << ',' << format_double(row.score)
            << ',';
        if (row.threshold) out << format_double(*row.threshold);
        out << ',' << (row.alarm ? 1 : 0) << '\n';
      }
    }
    finish_output(out, path);
  }

  {
    const auto path = out_dir / "bursts.csv";
    auto out = open_output(path);
    out << "time,state,alarm\n";
    if (a.burst) {
      const BurstPath& p = a.burst->path;
      // One row per gap, stamped with the gap's start; alarm marks gaps that
      // begin a burst.
      int prev = 0;
      for (std::size_t i = 0; i < p.states.size(); ++i) {
        const bool alarm = p.states[i] == 1 && prev == 0;
        out << format_double(p.event_times[i]) << ',' << p.states[i] << ','
            << (alarm ? 1 : 0) << '\n';
        prev = p.states[i];
      }
    }
    finish_output(out, path);
  }

  {
    const auto path = out_dir / "summary.json";
    auto out = open_output(path);
    out << summary_json(a);
    finish_output(out, path);
  }
}

void write_sdnml_diagnostics(std::span<const SdnmlDiagnosticRow> rows,
                             const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "layer,t,code_length,coefficient_norm,residual_sum\n";
  for (const SdnmlDiagnosticRow& row : rows) {
    out << row.layer << ',' << row.t << ',';
    if (!std::isnan(row.code_length)) out << format_double(row.code_length);
    out << ',' << format_double(row.coefficient_norm) << ','
        << format_double(row.residual_sum) << '\n';
  }
  finish_output(out, path);
}

}  // namespace linkanomaly
