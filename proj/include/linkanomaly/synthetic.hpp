#pragma once

#include <cstdint>
#include <vector>

#include "linkanomaly/mention_model.hpp"

namespace linkanomaly {

// Synthetic post stream: a fixed user universe posts at Poisson rates, each
// post mentions a geometric number of users drawn mostly from the author's
// friend circle. At emergence_time the affected users speed up by
// rate_multiplier and start mentioning brand-new accounts with probability
// novel_prob, which is the signature an emerging topic leaves in the stream.
struct SyntheticScenario {
  std::uint64_t seed = 42;
  std::size_t user_count = 200;
  double duration = 8.0 * 86400.0;

  // Baseline behaviour.
  double posts_per_user_per_day = 24.0;
  double mean_mentions = 1.2;           // mean of the geometric mention count
  std::size_t friends_per_user = 20;    // friend circle size (before dedup)
  double popularity_exponent = 1.0;     // friend picks favour low user indices
  double baseline_novel_prob = 0.02;    // chance a mention leaves the circle

  // Emergence effect.
  double emergence_time = 7.0 * 86400.0;  // t*; at or past duration = no change
  double rate_multiplier = 3.0;
  double novel_prob = 0.5;
  double affected_fraction = 1.0;

  void validate() const;
};

// Generates the stream, time-ordered. Deterministic: equal scenarios produce
// identical streams on every platform.
std::vector<Post> generate_synthetic_stream(const SyntheticScenario& scenario);

}  // namespace linkanomaly
