#include "linkanomaly/burst.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace linkanomaly {

void BurstConfig::validate() const {
  if (!(quiet_rate > 0.0) || !std::isfinite(quiet_rate))
    throw std::invalid_argument("quiet rate must be positive and finite");
  if (!(burst_rate > 0.0) || !std::isfinite(burst_rate))
    throw std::invalid_argument("burst rate must be positive and finite");
  if (!(switch_prob > 0.0) || !(switch_prob < 1.0))
    throw std::invalid_argument("switch probability must lie in (0, 1)");
}

std::vector<double> filter_events(const ScoreSeries& series, double threshold) {
  std::vector<double> events;
  for (std::size_t j = 0; j < series.values.size(); ++j) {
    const double v = series.values[j];
    if (v > 0.0 && v >= threshold) events.push_back(series.window_start(j));
  }
  return events;
}

BurstPath burst_viterbi(std::span<const double> event_times, const BurstConfig& cfg) {
  cfg.validate();
  BurstPath path;
  path.event_times.assign(event_times.begin(), event_times.end());
  if (event_times.size() < 2) return path;

  const std::size_t gaps = event_times.size() - 1;
  std::vector<double> gap(gaps);
  for (std::size_t i = 0; i < gaps; ++i) {
    if (!std::isfinite(event_times[i]) || !std::isfinite(event_times[i + 1]))
      throw std::invalid_argument("event times must be finite");
    gap[i] = event_times[i + 1] - event_times[i];
    if (!(gap[i] > 0.0))
      throw std::invalid_argument("event times must be strictly increasing");
  }

  const double rate[2] = {cfg.quiet_rate, cfg.burst_rate};
  const double log_rate[2] = {std::log(rate[0]), std::log(rate[1])};
  const double log_stay = std::log(1.0 - cfg.switch_prob);
  const double log_switch = std::log(cfg.switch_prob);
  auto emit = [&](int s, std::size_t i) { return log_rate[s] - rate[s] * gap[i]; };
  auto trans = [&](int from, int to) { return from == to ? log_stay : log_switch; };

  // Backward pass: best[i][s] is the exact best log-likelihood of gaps i..end
  // given gap i is in state s. Greedy forward reconstruction over these
  // values then yields the lexicographically smallest maximizer (quiet = 0
  // sorts first), which is the tie-breaking contract.
  std::vector<double> best(gaps * 2);
  for (int s = 0; s < 2; ++s) best[(gaps - 1) * 2 + s] = emit(s, gaps - 1);
  for (std::size_t i = gaps - 1; i-- > 0;) {
    for (int s = 0; s < 2; ++s) {
      const double to_quiet = trans(s, 0) + best[(i + 1) * 2 + 0];
      const double to_burst = trans(s, 1) + best[(i + 1) * 2 + 1];
      best[i * 2 + s] = emit(s, i) + std::max(to_quiet, to_burst);
    }
  }

  path.states.resize(gaps);
  const double from_start_quiet = log_stay + best[0];
  const double from_start_burst = log_switch + best[1];
  path.states[0] = from_start_quiet >= from_start_burst ? 0 : 1;
  path.log_prob = std::max(from_start_quiet, from_start_burst);
  for (std::size_t i = 1; i < gaps; ++i) {
    const int prev = path.states[i - 1];
    const double to_quiet = trans(prev, 0) + best[i * 2 + 0];
    const double to_burst = trans(prev, 1) + best[i * 2 + 1];
    path.states[i] = to_quiet >= to_burst ? 0 : 1;
  }

  path.alarm_times = burst_alarms(path.states, path.event_times);
  return path;
}

std::vector<double> burst_alarms(std::span<const int> states,
                                 std::span<const double> event_times) {
  if (!states.empty() && event_times.size() != states.size() + 1)
    throw std::invalid_argument("a path over n events carries n-1 states");
  std::vector<double> alarms;
  int prev = 0;  // virtual quiet state ahead of the first gap
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] == 1 && prev == 0) alarms.push_back(event_times[i]);
    prev = states[i];
  }
  return alarms;
}

SlidingBurstDetector::SlidingBurstDetector(const BurstConfig& cfg,
                                           std::size_t suffix_events)
    : cfg_(cfg), suffix_events_(suffix_events) {
  cfg_.validate();
  if (suffix_events_ < 2)
    throw std::invalid_argument("suffix must hold at least 2 events");
}

const BurstPath& SlidingBurstDetector::add(double event_time) {
  if (!suffix_.empty() && !(event_time > suffix_.back()))
    throw std::invalid_argument("event times must be strictly increasing");
  suffix_.push_back(event_time);
  while (suffix_.size() > suffix_events_) suffix_.pop_front();
  const std::vector<double> events(suffix_.begin(), suffix_.end());
  path_ = burst_viterbi(events, cfg_);
  return path_;
}

bool SlidingBurstDetector::in_burst() const {
  return !path_.states.empty() && path_.states.back() == 1;
}

}  // namespace linkanomaly
