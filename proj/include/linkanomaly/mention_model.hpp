#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "linkanomaly/errors.hpp"

// Probability model for the "who mentions whom, and how much" structure of a
// post stream. Each user gets a sliding-window history; a new post is scored
// by how surprising its mention count and its mentionees are under predictive
// distributions learned from that history. High scores mean the post's link
// structure is anomalous for its author.
namespace linkanomaly {

// One post: author, timestamp in seconds, and the users it mentions.
// Duplicate mentionees are legal and carry multiplicity.
struct Post {
  double time = 0.0;
  std::string user;
  std::vector<std::string> mentions;

  std::size_t mention_count() const { return mentions.size(); }
};

// Smoothing hyperparameters. alpha/beta shape the mention-count predictive,
// gamma is the new-mentionee mass. All must be positive.
struct MentionModelParams {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;

  void validate() const;
};

// Per-user training state over the trailing time window: the posts observed
// in [now - window, now], their total mention count, and per-mentionee
// counts. Eviction is driven by the caller-supplied clock so histories can
// be replayed deterministically.
class UserHistory {
 public:
  static constexpr double kDefaultWindowSeconds = 30.0 * 86400.0;

  explicit UserHistory(double window_seconds = kDefaultWindowSeconds,
                       double order_slack = 0.0);

  // Appends a post and evicts entries older than now - window. Throws
  // StreamOrderError if the post predates the newest accepted post by more
  // than the order slack.
  void add(const Post& post, double now);

  // Number of posts currently in the window (n).
  std::size_t post_count() const { return window_.size(); }

  // Total mentions over the window (m).
  std::uint64_t mention_total() const { return mention_total_; }

  // Mentions of v over the window (m_v); zero for unseen users.
  std::uint64_t mention_count_for(const std::string& v) const;

  // Distinct mentionees currently in the window.
  std::size_t distinct_mentionees() const { return counts_.size(); }

  double window_seconds() const { return window_seconds_; }
  double last_time() const { return last_time_; }

 private:
  struct Entry {
    double time;
    std::vector<std::string> mentions;
  };

  void evict(double now);

  std::deque<Entry> window_;
  std::unordered_map<std::string, std::uint64_t> counts_;
  std::uint64_t mention_total_ = 0;
  double window_seconds_;
  double order_slack_;
  double last_time_;
  bool has_posts_ = false;
};

// Probability that a post has exactly k mentions when each additional
// mention is added with probability 1-theta: (1-theta)^k * theta.
// Requires theta in (0, 1].
double geometric_pmf(std::uint64_t k, double theta);

// Predictive probability of a post with k mentions from a history with n
// posts and m total mentions, integrating the geometric parameter against
// its conjugate prior:
//   (n+alpha)/(m+k+beta) * prod_{j=0..k} (m+beta+j)/(n+m+alpha+beta+j)
// Sums to 1 over k = 0,1,2,....
double predict_mention_count(std::uint64_t k, std::uint64_t n, std::uint64_t m,
                             const MentionModelParams& params);

// Log of predict_mention_count, computed as a sum of logs so large k cannot
// underflow.
double log_predict_mention_count(std::uint64_t k, std::uint64_t n, std::uint64_t m,
                                 const MentionModelParams& params);

// Predictive probability that the next mentionee is v: m_v/(m+gamma) when v
// was mentioned before, gamma/(m+gamma) otherwise. The "otherwise" value is
// the total mass reserved for any never-mentioned user, and every unseen v
// receives it. Masses over seen users plus the unseen mass sum to 1.
double predict_mentionee(const std::string& v, const UserHistory& history,
                         const MentionModelParams& params);

// Anomaly score of a post given its author's history:
//   -log P(k | history) - sum_v log P(v | history)
// summed over the mention list with multiplicity, all terms evaluated
// against the history as it stood before the post. Finite and non-negative
// whenever params are valid.
double link_anomaly_score(const Post& post, const UserHistory& history,
                          const MentionModelParams& params);

}  // namespace linkanomaly
