// Command-line front end: `run` scores a post stream and writes detector
// outputs, `generate` emits a synthetic stream, `sweep` re-runs the alarm
// threshold over several tail masses on one scored stream.
//
// Exit codes: 0 success, 1 usage error, 2 malformed data or I/O failure,
// 3 stream too short for the requested detectors.

#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "linkanomaly/errors.hpp"
#include "linkanomaly/io.hpp"
#include "linkanomaly/pipeline.hpp"
#include "linkanomaly/synthetic.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInsufficient = 3;

struct CommonOptions {
  std::string input;
  std::string format = "auto";
  std::string output_dir = "out";
  std::string sdnml_debug_path;
};

void add_pipeline_flags(CLI::App& cmd, linkanomaly::PipelineConfig& cfg,
                        CommonOptions& common) {
  cmd.add_option("-i,--input", common.input, "input stream file, or - for stdin")
      ->required();
  cmd.add_option("--format", common.format, "input format: auto, jsonl, tsv")
      ->check(CLI::IsMember({"auto", "jsonl", "tsv"}));
  cmd.add_option("-o,--output-dir", common.output_dir, "directory for result files");
  cmd.add_option("--sdnml-debug", common.sdnml_debug_path,
                 "write per-step scorer internals to this CSV file");

  cmd.add_option("--alpha", cfg.model.alpha, "mention-count prior strength (successes)");
  cmd.add_option("--beta", cfg.model.beta, "mention-count prior strength (failures)");
  cmd.add_option("--gamma", cfg.model.gamma, "new-mentionee mass");
  cmd.add_option("--history-window", cfg.history_window,
                 "per-user training window in seconds");
  cmd.add_option("--order-slack", cfg.order_slack,
                 "tolerated out-of-order arrival in seconds");

  cmd.add_option("--tau-changepoint", cfg.tau_changepoint,
                 "aggregation window for the change-point path, seconds");
  cmd.add_option("--tau-burst", cfg.tau_burst,
                 "aggregation window for the burst path, seconds");
  cmd.add_option("--origin", [&cfg](const std::vector<std::string>& vals) {
        cfg.origin = std::stod(vals.front());
        return true;
      }, "left edge of window 0 (default: first post floored to the grid)");

  cmd.add_option("--ar-order", [&cfg](const std::vector<std::string>& vals) {
        cfg.scoring.first.order = std::stoi(vals.front());
        cfg.scoring.second.order = cfg.scoring.first.order;
        return true;
      }, "autoregressive order for both scoring layers");
  cmd.add_option("--discount-first", cfg.scoring.first.discount,
                 "discounting rate of the first scoring layer");
  cmd.add_option("--discount-second", cfg.scoring.second.discount,
                 "discounting rate of the second scoring layer");
  cmd.add_option("--kappa", cfg.scoring.kappa, "smoothing width (both stages)");
  cmd.add_option("--warmup-margin", [&cfg](const std::vector<std::string>& vals) {
        cfg.scoring.first.warmup_margin = std::stoi(vals.front());
        cfg.scoring.second.warmup_margin = cfg.scoring.first.warmup_margin;
        return true;
      }, "extra warm-up samples past the autoregressive order");
  cmd.add_option("--ridge", [&cfg](const std::vector<std::string>& vals) {
        cfg.scoring.first.ridge = std::stod(vals.front());
        cfg.scoring.second.ridge = cfg.scoring.first.ridge;
        return true;
      }, "seed weight for the scorer statistics matrix");
  cmd.add_option("--variance-floor", [&cfg](const std::vector<std::string>& vals) {
        cfg.scoring.first.variance_floor = std::stod(vals.front());
        cfg.scoring.second.variance_floor = cfg.scoring.first.variance_floor;
        return true;
      }, "floor added to residual sums inside the density");

  cmd.add_option("--bins", cfg.dto.bins, "threshold histogram bin count");
  cmd.add_option("--rho", cfg.dto.rho, "alarm tail mass");
  cmd.add_option("--dto-smoothing", cfg.dto.smoothing,
                 "additive smoothing for the threshold histogram");
  cmd.add_option("--dto-discount", cfg.dto.discount,
                 "forgetting rate of the threshold histogram");
  cmd.add_option("--dto-warmup", cfg.dto_warmup,
                 "scores used to calibrate the histogram range");
  cmd.add_option("--dto-lower", [&cfg](const std::vector<std::string>& vals) {
        cfg.dto_lower = std::stod(vals.front());
        return true;
      }, "fixed lower histogram edge (with --dto-upper)");
  cmd.add_option("--dto-upper", [&cfg](const std::vector<std::string>& vals) {
        cfg.dto_upper = std::stod(vals.front());
        return true;
      }, "fixed upper histogram edge (with --dto-lower)");

  cmd.add_option("--quiet-rate", cfg.burst.quiet_rate,
                 "expected event rate outside bursts, events/second");
  cmd.add_option("--burst-rate", cfg.burst.burst_rate,
                 "expected event rate inside bursts, events/second");
  cmd.add_option("--switch-prob", cfg.burst.switch_prob,
                 "state switch probability between gaps");
  cmd.add_option("--filter-threshold", [&cfg](const std::vector<std::string>& vals) {
        cfg.filter_threshold = std::stod(vals.front());
        return true;
      }, "event filter level (default: percentile of warm-up windows)");
  cmd.add_option("--filter-percentile", cfg.filter_percentile,
                 "percentile used when calibrating the event filter");
  cmd.add_option("--burst-warmup", cfg.burst_warmup_windows,
                 "fine-grid windows used to calibrate the event filter");

  cmd.add_flag("!--no-changepoint", cfg.changepoint_enabled,
               "skip the change-point detector");
  cmd.add_flag("!--no-burst", cfg.burst_enabled, "skip the burst detector");

  cmd.add_option("--seed", cfg.seed, "random seed echoed into outputs");

  cmd.set_config("--config", "", "read options from a key=value file");
}

linkanomaly::StreamFormat parse_format(const std::string& name) {
  if (name == "jsonl") return linkanomaly::StreamFormat::kJsonl;
  if (name == "tsv") return linkanomaly::StreamFormat::kTsv;
  return linkanomaly::StreamFormat::kAuto;
}

std::vector<linkanomaly::Post> read_input(const CommonOptions& common) {
  const auto format = parse_format(common.format);
  if (common.input == "-") return linkanomaly::load_posts(std::cin, format);
  std::ifstream in(common.input, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file " + common.input);
  return linkanomaly::load_posts(in, format);
}

int run_command(const linkanomaly::PipelineConfig& cfg, const CommonOptions& common) {
  const auto posts = read_input(common);
  std::vector<linkanomaly::SdnmlDiagnosticRow> diagnostics;
  auto* diag_ptr = common.sdnml_debug_path.empty() ? nullptr : &diagnostics;
  const auto artifacts = linkanomaly::run_pipeline(posts, cfg, diag_ptr);
  linkanomaly::emit_results(artifacts, common.output_dir);
  if (diag_ptr)
    linkanomaly::write_sdnml_diagnostics(diagnostics, common.sdnml_debug_path);
  std::cout << linkanomaly::summary_json(artifacts);
  return artifacts.sufficient() ? kExitOk : kExitInsufficient;
}

int sweep_command(const linkanomaly::PipelineConfig& cfg, const CommonOptions& common,
                  const std::vector<double>& rhos) {
  auto sweep_cfg = cfg;
  sweep_cfg.changepoint_enabled = true;  // the sweep is over the threshold stage
  const auto posts = read_input(common);
  const auto artifacts = linkanomaly::run_pipeline(posts, sweep_cfg);
  const auto rows = linkanomaly::sweep_rho(artifacts, rhos);

  std::filesystem::create_directories(common.output_dir);
  const auto path = std::filesystem::path(common.output_dir) / "sweep.csv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "rho,num_detections,first_detection_time\n";
  for (const auto& row : rows) {
    out << linkanomaly::format_double(row.rho) << ',' << row.detections << ',';
    if (row.first_detection_time)
      out << linkanomaly::format_double(*row.first_detection_time);
    out << '\n';
    std::cout << "rho=" << linkanomaly::format_double(row.rho)
              << " detections=" << row.detections << '\n';
  }
  out.flush();
  if (!out.good()) throw std::runtime_error("failed while writing " + path.string());
  return artifacts.changepoint->sufficient ? kExitOk : kExitInsufficient;
}

int generate_command(const linkanomaly::SyntheticScenario& scenario,
                     const std::string& output) {
  const auto posts = linkanomaly::generate_synthetic_stream(scenario);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (output != "-") {
    file.open(output, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file " + output);
    out = &file;
  }
  for (const auto& post : posts) {
    *out << "{\"t\": " << linkanomaly::format_double(post.time) << ", \"user\": \""
         << post.user << "\", \"mentions\": [";
    for (std::size_t i = 0; i < post.mentions.size(); ++i) {
      if (i) *out << ", ";
      *out << '"' << post.mentions[i] << '"';
    }
    *out << "]}\n";
  }
  out->flush();
  if (!out->good()) throw std::runtime_error("failed while writing " + output);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"link-anomaly detection over mention streams"};
  app.require_subcommand(1);

  linkanomaly::PipelineConfig cfg;
  CommonOptions run_common;
  auto* run_cmd = app.add_subcommand("run", "score a stream and run the detectors");
  add_pipeline_flags(*run_cmd, cfg, run_common);

  linkanomaly::PipelineConfig sweep_cfg_base;
  CommonOptions sweep_common;
  std::vector<double> rhos{0.01, 0.05, 0.1};
  auto* sweep_cmd =
      app.add_subcommand("sweep", "re-run the alarm threshold over several tail masses");
  add_pipeline_flags(*sweep_cmd, sweep_cfg_base, sweep_common);
  sweep_cmd->add_option("--rho-list", rhos, "tail masses to sweep");

  linkanomaly::SyntheticScenario scenario;
  std::string generate_output = "-";
  auto* gen_cmd = app.add_subcommand("generate", "emit a synthetic post stream");
  gen_cmd->add_option("-o,--output", generate_output, "output file, or - for stdout");
  gen_cmd->add_option("--seed", scenario.seed, "random seed");
  gen_cmd->add_option("--users", scenario.user_count, "user universe size");
  gen_cmd->add_option("--duration", scenario.duration, "stream length in seconds");
  gen_cmd->add_option("--posts-per-day", scenario.posts_per_user_per_day,
                      "baseline posts per user per day");
  gen_cmd->add_option("--mean-mentions", scenario.mean_mentions,
                      "mean mentions per post");
  gen_cmd->add_option("--friends", scenario.friends_per_user, "friend circle size");
  gen_cmd->add_option("--popularity-exponent", scenario.popularity_exponent,
                      "skew of the mention popularity distribution");
  gen_cmd->add_option("--baseline-novel-prob", scenario.baseline_novel_prob,
                      "baseline out-of-circle mention probability");
  gen_cmd->add_option("--emergence-time", scenario.emergence_time,
                      "seconds at which the emergence effect starts");
  gen_cmd->add_option("--rate-multiplier", scenario.rate_multiplier,
                      "post rate multiplier after the emergence time");
  gen_cmd->add_option("--novel-prob", scenario.novel_prob,
                      "novel-mentionee probability after the emergence time");
  gen_cmd->add_option("--affected-fraction", scenario.affected_fraction,
                      "fraction of users subject to the emergence effect");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run_cmd->parsed()) return run_command(cfg, run_common);
    if (sweep_cmd->parsed()) return sweep_command(sweep_cfg_base, sweep_common, rhos);
    if (gen_cmd->parsed()) return generate_command(scenario, generate_output);
  } catch (const linkanomaly::ParseError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const linkanomaly::StreamOrderError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
