#pragma once

#include <cstddef>
#include <optional>
#include <vector>

// Adaptive alarm threshold over a score stream. A histogram with one open
// bin below a, one open bin at and above b, and equally wide cells in
// between tracks the score distribution with exponential forgetting; the
// alarm threshold sits one cell above the (1-rho) quantile, so only scores
// that clear the historical tail by a full cell raise alarms.
namespace linkanomaly {

struct DtoConfig {
  // Total bin count including both open tails; must be >= 3.
  int bins = 20;
  // Tail mass: smaller rho pushes the threshold higher.
  double rho = 0.05;
  // Additive smoothing applied when normalizing the histogram.
  double smoothing = 0.01;
  // Forgetting rate: each update scales old cell weights by (1-discount).
  double discount = 0.005;

  void validate() const;
};

class ThresholdHistogram {
 public:
  // a/b are the closed range covered by the interior cells; requires a < b.
  ThresholdHistogram(const DtoConfig& cfg, double a, double b);

  // 1-based index of the bin holding score: bin 1 is (-inf, a), bin N is
  // [b, inf), interior cells are half-open so boundary scores go up.
  int bin_index(double score) const;

  // Current threshold: one cell above the smallest bin prefix holding at
  // least 1-rho of the normalized mass. May exceed b.
  double threshold() const;

  // True when score clears the current threshold. Evaluate before update():
  // an alarm decision for a score must not see that score in the histogram.
  bool alarm(double score) const { return score >= threshold(); }

  // Folds score into the histogram with forgetting. Throws on NaN.
  void update(double score);

  struct StepResult {
    double threshold = 0.0;
    bool alarm = false;
  };

  // threshold -> alarm -> update, in that order.
  StepResult step(double score);

  // Normalized distribution (smoothing applied); sums to 1.
  std::vector<double> distribution() const;

  double lower_edge() const { return a_; }
  double upper_edge() const { return b_; }
  const DtoConfig& config() const { return cfg_; }

 private:
  DtoConfig cfg_;
  double a_;
  double b_;
  double cell_width_;
  std::vector<double> weights_;  // raw (unnormalized) cell weights
};

// Pipeline-facing wrapper that calibrates the histogram range from the first
// warmup_scores scores (a = their min, b = their max, then frozen), replays
// those scores as updates, and evaluates threshold/alarm for every score
// after warm-up. Fixed a/b skip calibration entirely.
class DtoDetector {
 public:
  DtoDetector(const DtoConfig& cfg, std::size_t warmup_scores,
              std::optional<double> fixed_a = std::nullopt,
              std::optional<double> fixed_b = std::nullopt);

  struct Decision {
    // Threshold/alarm are absent while the detector is still calibrating.
    std::optional<double> threshold;
    bool alarm = false;
  };

  Decision step(double score);

  bool calibrated() const { return histogram_.has_value(); }
  const ThresholdHistogram& histogram() const { return *histogram_; }

 private:
  void calibrate();

  DtoConfig cfg_;
  std::size_t warmup_scores_;
  std::optional<double> fixed_a_;
  std::optional<double> fixed_b_;
  std::vector<double> pending_;
  std::optional<ThresholdHistogram> histogram_;
};

}  // namespace linkanomaly
