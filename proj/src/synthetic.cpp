#include "linkanomaly/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "linkanomaly/random.hpp"

namespace linkanomaly {

void SyntheticScenario::validate() const {
  if (user_count == 0) throw std::invalid_argument("user count must be positive");
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be positive");
  if (!(posts_per_user_per_day > 0.0))
    throw std::invalid_argument("post rate must be positive");
  if (!(mean_mentions > 0.0))
    throw std::invalid_argument("mean mention count must be positive");
  if (friends_per_user == 0)
    throw std::invalid_argument("friend circle must be non-empty");
  if (popularity_exponent < 0.0)
    throw std::invalid_argument("popularity exponent must be >= 0");
  if (baseline_novel_prob < 0.0 || baseline_novel_prob > 1.0 ||
      novel_prob < 0.0 || novel_prob > 1.0)
    throw std::invalid_argument("novel-mention probabilities must lie in [0, 1]");
  if (emergence_time < 0.0)
    throw std::invalid_argument("emergence time must be >= 0");
  if (!(rate_multiplier > 0.0))
    throw std::invalid_argument("rate multiplier must be positive");
  if (affected_fraction < 0.0 || affected_fraction > 1.0)
    throw std::invalid_argument("affected fraction must lie in [0, 1]");
}

double nearest_rank_percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty set");
  if (!(q > 0.0) || q > 1.0) throw std::invalid_argument("q must lie in (0, 1]");
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(values.size())));
  return values[rank - 1];
}

namespace {

std::string user_name(std::size_t index) { return "u" + std::to_string(index); }

}  // namespace

std::vector<Post> generate_synthetic_stream(const SyntheticScenario& sc) {
  sc.validate();
  Rng rng(sc.seed);

  // Popularity weights over the universe; friend picks favour popular users.
  std::vector<double> cumulative(sc.user_count);
  double total = 0.0;
  for (std::size_t i = 0; i < sc.user_count; ++i) {
    total += std::pow(static_cast<double>(i + 1), -sc.popularity_exponent);
    cumulative[i] = total;
  }

  const double theta = 1.0 / (1.0 + sc.mean_mentions);
  const double base_rate = sc.posts_per_user_per_day / 86400.0;
  const auto affected_count = static_cast<std::size_t>(
      std::ceil(sc.affected_fraction * static_cast<double>(sc.user_count)));

  std::vector<Post> posts;
  for (std::size_t uid = 0; uid < sc.user_count; ++uid) {
    const bool affected = uid < affected_count;

    // Friend circle: popularity-weighted picks, duplicates collapsed. Weights
    // within the circle reuse the global popularity of each friend.
    std::vector<std::size_t> friends;
    for (std::size_t i = 0; i < sc.friends_per_user; ++i) {
      const std::size_t pick = rng.categorical(cumulative);
      if (std::find(friends.begin(), friends.end(), pick) == friends.end())
        friends.push_back(pick);
    }
    std::vector<double> friend_cumulative(friends.size());
    double friend_total = 0.0;
    for (std::size_t i = 0; i < friends.size(); ++i) {
      friend_total +=
          std::pow(static_cast<double>(friends[i] + 1), -sc.popularity_exponent);
      friend_cumulative[i] = friend_total;
    }

    std::uint64_t novel_counter = 0;
    const std::string author = user_name(uid);

    // Piecewise Poisson arrivals: baseline rate until the emergence time,
    // boosted rate afterwards for affected users. The process is memoryless,
    // so restarting the clock at the switch point is exact.
    double t = rng.exponential(base_rate);
    bool switched = !(affected && sc.rate_multiplier != 1.0) ||
                    sc.emergence_time >= sc.duration;
    while (true) {
      if (!switched && t >= sc.emergence_time) {
        t = sc.emergence_time + rng.exponential(base_rate * sc.rate_multiplier);
        switched = true;
        continue;
      }
      if (t >= sc.duration) break;

      const bool post_change = affected && t >= sc.emergence_time;
      const double p_novel =
          post_change ? sc.novel_prob : sc.baseline_novel_prob;

      Post post;
      post.time = t;
      post.user = author;
      const std::uint64_t k = rng.geometric(theta);
      post.mentions.reserve(k);
      for (std::uint64_t j = 0; j < k; ++j) {
        if (rng.uniform01() < p_novel) {
          if (post_change) {
            // Brand-new account nobody has mentioned before.
            post.mentions.push_back("x" + author + "n" +
                                    std::to_string(novel_counter++));
          } else {
            // Out-of-circle mention: anyone in the universe.
            post.mentions.push_back(user_name(rng.categorical(cumulative)));
          }
        } else {
          post.mentions.push_back(
              user_name(friends[rng.categorical(friend_cumulative)]));
        }
      }
      posts.push_back(std::move(post));

      const double rate = (affected && switched && t >= sc.emergence_time)
                              ? base_rate * sc.rate_multiplier
                              : base_rate;
      t += rng.exponential(rate);
    }
  }

  // Users were simulated independently; merge into one time-ordered stream.
  // Ties (vanishingly rare with real-valued times) break by author then by
  // generation order, so the merge is fully deterministic.
  std::stable_sort(posts.begin(), posts.end(), [](const Post& a, const Post& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.user < b.user;
  });
  return posts;
}

}  // namespace linkanomaly
