#include "linkanomaly/aggregate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace linkanomaly {

ScoreAggregator::ScoreAggregator(double tau, double origin, double order_slack)
    : tau_(tau), origin_(origin), order_slack_(order_slack), last_time_(origin) {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("aggregation window must be positive");
  if (!std::isfinite(origin)) throw std::invalid_argument("origin must be finite");
  if (order_slack_ < 0.0) throw std::invalid_argument("order slack must be >= 0");
}

void ScoreAggregator::add(double time, double score) {
  if (!std::isfinite(time)) throw std::invalid_argument("post time must be finite");
  if (time < origin_)
    throw std::invalid_argument("post at t=" + std::to_string(time) +
                                " precedes aggregation origin");
  if (has_posts_ && time + order_slack_ < last_time_)
    throw std::invalid_argument("posts must be time-ordered for aggregation");
  if (time > last_time_) last_time_ = time;
  has_posts_ = true;
  // floor() puts a post exactly on a window edge into the later window,
  // matching the half-open [start, start + tau) convention.
  const auto j = static_cast<std::size_t>(std::floor((time - origin_) / tau_));
  if (j >= sums_.size()) sums_.resize(j + 1, 0.0);
  sums_[j] += score;
}

ScoreSeries ScoreAggregator::finish() && {
  ScoreSeries out;
  out.tau = tau_;
  out.origin = origin_;
  out.values = std::move(sums_);
  for (double& v : out.values) v /= tau_;
  return out;
}

ScoreSeries aggregate_scores(std::span<const ScoredPost> posts, double tau,
                             double origin) {
  ScoreAggregator agg(tau, origin);
  for (const auto& p : posts) agg.add(p.time, p.score);
  return std::move(agg).finish();
}

}  // namespace linkanomaly
