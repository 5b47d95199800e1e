#include "linkanomaly/dto.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace linkanomaly {

namespace {

// Slack for the quantile prefix comparison: a cumulative sum that equals
// 1-rho in exact arithmetic must still satisfy ">=" after rounding.
constexpr double kQuantileEps = 1e-12;

}  // namespace

void DtoConfig::validate() const {
  if (bins < 3)
    throw std::invalid_argument("histogram needs at least 3 bins (two tails plus one cell)");
  if (!(rho > 0.0) || !(rho < 1.0))
    throw std::invalid_argument("rho must lie in (0, 1)");
  if (!(smoothing > 0.0))
    throw std::invalid_argument("smoothing must be positive");
  if (!(discount > 0.0) || !(discount < 1.0))
    throw std::invalid_argument("discount must lie in (0, 1)");
}

ThresholdHistogram::ThresholdHistogram(const DtoConfig& cfg, double a, double b)
    : cfg_(cfg), a_(a), b_(b) {
  cfg_.validate();
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
    throw std::invalid_argument("histogram range requires a < b");
  cell_width_ = (b_ - a_) / static_cast<double>(cfg_.bins - 2);
  weights_.assign(static_cast<std::size_t>(cfg_.bins),
                  1.0 / static_cast<double>(cfg_.bins));
}

int ThresholdHistogram::bin_index(double score) const {
  if (std::isnan(score)) throw std::invalid_argument("score must not be NaN");
  if (score < a_) return 1;
  if (score >= b_) return cfg_.bins;
  auto cell = static_cast<long>(std::floor((score - a_) / cell_width_));
  // Rounding near b could push the cell one past the last interior slot.
  cell = std::clamp<long>(cell, 0, cfg_.bins - 3);
  return 2 + static_cast<int>(cell);
}

double ThresholdHistogram::threshold() const {
  const std::vector<double> q = distribution();
  const double need = 1.0 - cfg_.rho;
  int l = cfg_.bins;
  double cum = 0.0;
  for (int h = 1; h <= cfg_.bins; ++h) {
    cum += q[static_cast<std::size_t>(h - 1)];
    if (cum + kQuantileEps >= need) {
      l = h;
      break;
    }
  }
  return a_ + cell_width_ * static_cast<double>(l + 1);
}

void ThresholdHistogram::update(double score) {
  const int h = bin_index(score);
  const double keep = 1.0 - cfg_.discount;
  for (double& w : weights_) w *= keep;
  weights_[static_cast<std::size_t>(h - 1)] += cfg_.discount;
}

ThresholdHistogram::StepResult ThresholdHistogram::step(double score) {
  StepResult out;
  out.threshold = threshold();
  out.alarm = score >= out.threshold;
  update(score);
  return out;
}

std::vector<double> ThresholdHistogram::distribution() const {
  double total = 0.0;
  for (double w : weights_) total += w;
  const double denom =
      total + static_cast<double>(cfg_.bins) * cfg_.smoothing;
  std::vector<double> q(weights_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i)
    q[i] = (weights_[i] + cfg_.smoothing) / denom;
  return q;
}

DtoDetector::DtoDetector(const DtoConfig& cfg, std::size_t warmup_scores,
                         std::optional<double> fixed_a,
                         std::optional<double> fixed_b)
    : cfg_(cfg), warmup_scores_(warmup_scores), fixed_a_(fixed_a), fixed_b_(fixed_b) {
  cfg_.validate();
  if (fixed_a_.has_value() != fixed_b_.has_value())
    throw std::invalid_argument("fix both histogram edges or neither");
  if (fixed_a_) {
    histogram_.emplace(cfg_, *fixed_a_, *fixed_b_);
  } else if (warmup_scores_ == 0) {
    throw std::invalid_argument("range calibration needs at least one warm-up score");
  }
}

DtoDetector::Decision DtoDetector::step(double score) {
  if (std::isnan(score)) throw std::invalid_argument("score must not be NaN");
  if (!histogram_) {
    pending_.push_back(score);
    if (pending_.size() >= warmup_scores_) calibrate();
    return {};
  }
  const auto r = histogram_->step(score);
  return {r.threshold, r.alarm};
}

void DtoDetector::calibrate() {
  double a = pending_.front();
  double b = pending_.front();
  for (double s : pending_) {
    a = std::min(a, s);
    b = std::max(b, s);
  }
  // All warm-up scores identical: widen to a usable range.
  if (!(a < b)) b = a + 1.0;
  histogram_.emplace(cfg_, a, b);
  // Warm-up scores shape the initial distribution but never raise alarms.
  for (double s : pending_) histogram_->update(s);
  pending_.clear();
  pending_.shrink_to_fit();
}

}  // namespace linkanomaly
