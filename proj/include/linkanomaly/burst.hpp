#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "linkanomaly/aggregate.hpp"

// Burst detection over filtered event times: a two-state chain (quiet/burst)
// with exponential inter-event gap emissions. The burst state expects short
// gaps; the most probable state path over all gaps is decoded exactly, and
// alarms mark where the path enters the burst state.
namespace linkanomaly {

struct BurstConfig {
  // Expected gap rates per state; burst means denser events.
  double quiet_rate = 0.001;
  double burst_rate = 0.01;
  // Probability that consecutive gaps disagree in state.
  double switch_prob = 0.3;

  void validate() const;
};

// Start times of windows whose aggregated score passes the filter. Empty
// windows never become events; with threshold 0 every nonzero window passes.
std::vector<double> filter_events(const ScoreSeries& series, double threshold);

// Decoded path. states[i] labels the gap [event_times[i], event_times[i+1]]
// (0 quiet, 1 burst); a path over n events has n-1 states. alarm_times hold
// the gap-start times where the path enters the burst state, with a virtual
// quiet state before the first gap.
struct BurstPath {
  std::vector<double> event_times;
  std::vector<int> states;
  std::vector<double> alarm_times;
  double log_prob = 0.0;
};

// Exact most-probable path (joint transition and emission likelihood, chain
// started in the quiet state). Ties prefer quiet, earliest gap first, so the
// result is the lexicographically smallest maximizer. Fewer than 2 events
// yield an empty path. Event times must be strictly increasing and finite.
BurstPath burst_viterbi(std::span<const double> event_times, const BurstConfig& cfg);

// Alarm times of a state path: gap starts where the state switches 0 -> 1
// (the state before the first gap counts as quiet).
std::vector<double> burst_alarms(std::span<const int> states,
                                 std::span<const double> event_times);

// Online variant: keeps the newest suffix_events event times and re-decodes
// that suffix after each arrival. Useful when the stream is unbounded and a
// full decode per event would grow without limit.
class SlidingBurstDetector {
 public:
  SlidingBurstDetector(const BurstConfig& cfg, std::size_t suffix_events);

  // Adds one event (strictly after all previous ones) and returns the path
  // decoded over the kept suffix.
  const BurstPath& add(double event_time);

  // State of the newest gap in the latest decode (false when fewer than two
  // events are held).
  bool in_burst() const;

  const BurstPath& path() const { return path_; }

 private:
  BurstConfig cfg_;
  std::size_t suffix_events_;
  std::deque<double> suffix_;
  BurstPath path_;
};

}  // namespace linkanomaly
