#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace linkanomaly {

// A per-post anomaly score stamped with the post's time.
struct ScoredPost {
  double time = 0.0;
  double score = 0.0;
};

// Scores folded onto a regular time grid: values[j] holds the aggregate for
// the half-open window [origin + j*tau, origin + (j+1)*tau). Windows with no
// posts hold 0 so the series is gap-free from the origin through the last
// post.
struct ScoreSeries {
  double tau = 0.0;
  double origin = 0.0;
  std::vector<double> values;

  double window_start(std::size_t j) const {
    return origin + tau * static_cast<double>(j);
  }
};

// Streaming fold of time-ordered scores into fixed windows. Each post lands
// in exactly one window; a window's value is the sum of its posts' scores
// divided by tau, so sum(values) * tau conserves the total score mass.
class ScoreAggregator {
 public:
  // tau must be positive. origin is the left edge of window 0. order_slack
  // is how far behind the newest accepted time a post may arrive; binning
  // always uses the post's true time.
  ScoreAggregator(double tau, double origin, double order_slack = 0.0);

  // Adds one score. Throws std::invalid_argument if time is not finite, is
  // before the origin, or precedes a previously added time by more than the
  // slack.
  void add(double time, double score);

  // Finalizes the series (divides window sums by tau). The aggregator may
  // not be reused afterwards.
  ScoreSeries finish() &&;

  std::size_t window_count() const { return sums_.size(); }

 private:
  double tau_;
  double origin_;
  double order_slack_;
  double last_time_;
  bool has_posts_ = false;
  std::vector<double> sums_;
};

// Convenience wrapper: folds an already-collected score list.
ScoreSeries aggregate_scores(std::span<const ScoredPost> posts, double tau,
                             double origin);

}  // namespace linkanomaly
