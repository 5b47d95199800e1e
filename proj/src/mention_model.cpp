#include "linkanomaly/mention_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace linkanomaly {

void MentionModelParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("alpha must be positive and finite");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("beta must be positive and finite");
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("gamma must be positive and finite");
}

UserHistory::UserHistory(double window_seconds, double order_slack)
    : window_seconds_(window_seconds),
      order_slack_(order_slack),
      last_time_(-std::numeric_limits<double>::infinity()) {
  if (!(window_seconds > 0.0))
    throw std::invalid_argument("history window must be positive");
  if (order_slack < 0.0) throw std::invalid_argument("order slack must be >= 0");
}

void UserHistory::add(const Post& post, double now) {
  if (has_posts_ && post.time + order_slack_ < last_time_) {
    throw StreamOrderError("post at t=" + std::to_string(post.time) +
                           " precedes newest history entry at t=" +
                           std::to_string(last_time_));
  }
  evict(now);
  window_.push_back(Entry{post.time, post.mentions});
  for (const auto& v : post.mentions) {
    ++counts_[v];
    ++mention_total_;
  }
  if (post.time > last_time_ || !has_posts_) last_time_ = post.time;
  has_posts_ = true;
}

std::uint64_t UserHistory::mention_count_for(const std::string& v) const {
  auto it = counts_.find(v);
  return it == counts_.end() ? 0 : it->second;
}

void UserHistory::evict(double now) {
  const double cutoff = now - window_seconds_;
  // Entries exactly at the window edge stay: the window is [now - T, now].
  while (!window_.empty() && window_.front().time < cutoff) {
    const Entry& e = window_.front();
    for (const auto& v : e.mentions) {
      auto it = counts_.find(v);
      if (--(it->second) == 0) counts_.erase(it);
      --mention_total_;
    }
    window_.pop_front();
  }
}

double geometric_pmf(std::uint64_t k, double theta) {
  if (!(theta > 0.0) || theta > 1.0 || !std::isfinite(theta))
    throw std::invalid_argument("theta must lie in (0, 1]");
  return std::pow(1.0 - theta, static_cast<double>(k)) * theta;
}

double predict_mention_count(std::uint64_t k, std::uint64_t n, std::uint64_t m,
                             const MentionModelParams& params) {
  params.validate();
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  const double kk = static_cast<double>(k);
  double p = (nn + params.alpha) / (mm + kk + params.beta);
  for (std::uint64_t j = 0; j <= k; ++j) {
    const double jj = static_cast<double>(j);
    p *= (mm + params.beta + jj) / (nn + mm + params.alpha + params.beta + jj);
  }
  return p;
}

double log_predict_mention_count(std::uint64_t k, std::uint64_t n, std::uint64_t m,
                                 const MentionModelParams& params) {
  params.validate();
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  const double kk = static_cast<double>(k);
  double lp = std::log(nn + params.alpha) - std::log(mm + kk + params.beta);
  for (std::uint64_t j = 0; j <= k; ++j) {
    const double jj = static_cast<double>(j);
    lp += std::log(mm + params.beta + jj) -
          std::log(nn + mm + params.alpha + params.beta + jj);
  }
  return lp;
}

double predict_mentionee(const std::string& v, const UserHistory& history,
                         const MentionModelParams& params) {
  params.validate();
  const double m = static_cast<double>(history.mention_total());
  const double mv = static_cast<double>(history.mention_count_for(v));
  if (mv > 0.0) return mv / (m + params.gamma);
  return params.gamma / (m + params.gamma);
}

double link_anomaly_score(const Post& post, const UserHistory& history,
                          const MentionModelParams& params) {
  double score = -log_predict_mention_count(
      post.mention_count(), history.post_count(), history.mention_total(), params);
  for (const auto& v : post.mentions) {
    score -= std::log(predict_mentionee(v, history, params));
  }
  return score;
}

}  // namespace linkanomaly
