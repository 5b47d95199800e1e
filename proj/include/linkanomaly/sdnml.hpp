#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

// Sequentially normalized code-length scoring of a real-valued series under a
// discounted autoregressive model, and the two-stage smoothing stack that
// turns those code lengths into change-point scores. The score of a window is
// the number of nats needed to encode its value given the recent past; a
// regime change makes values expensive to encode and the score spikes.
namespace linkanomaly {

struct SdnmlConfig {
  // Autoregressive order p: each value is predicted from the previous p.
  int order = 30;
  // Discounting rate r in (0,1): the newest sample enters the fit statistics
  // with weight r, older samples decay by (1-r) per step.
  double discount = 0.01;
  // Warm-up ends at t0 = order + warmup_margin samples; estimates and
  // residuals start at t0+1, code lengths at t0+2.
  int warmup_margin = 1;
  // Seed weight on the identity added to the statistics matrix so its
  // inverse exists from the first update. Decays by (1-r) per step, so the
  // fit converges to the pure discounted least-squares solution.
  double ridge = 1e-6;
  // Added to residual sums inside the density so constant stretches of input
  // produce finite code lengths.
  double variance_floor = 1e-12;

  void validate() const;
  long warmup_end() const { return order + warmup_margin; }  // t0
  // Samples needed before the first code length is emitted.
  long min_samples() const { return warmup_end() + 2; }
};

// Online scorer. Feed samples one at a time; step() returns the code length
// of the sample once enough history exists, or nullopt during warm-up.
//
// Internally maintains the inverse V^{-1} of the discounted second-moment
// matrix via rank-one updates, the discounted cross-moment vector chi, the
// fitted coefficients a = V^{-1} chi, and the running sum S of squared fit
// residuals. The code length of x_t is
//   log K_t + (q/2) log S_t - ((q-1)/2) log S_{t-1},   q = t - t0,
// with K_t = sqrt(pi) * Gamma((q-1)/2) / ((1 - d_t) * Gamma(q/2)) chosen so
// that exp(-code length) integrates to 1 over x_t; d_t = c_t/(1-r+c_t) and
// c_t = r * xbar^T V_{t-1}^{-1} xbar measure the leverage of the lag vector.
class SdnmlScorer {
 public:
  explicit SdnmlScorer(SdnmlConfig cfg);

  // Consumes one sample, returns its code length in nats, or nullopt while
  // warming up. Throws std::invalid_argument on non-finite input.
  std::optional<double> step(double x);

  const SdnmlConfig& config() const { return cfg_; }

  // Samples consumed so far.
  long samples_seen() const { return t_; }

  // Sum of squared residuals accumulated since warm-up ended. Non-negative
  // and non-decreasing.
  double residual_sum() const { return s_; }

  // Fitted lag coefficients; empty until estimates start.
  std::span<const double> coefficients() const;

  // Euclidean norm of the fitted coefficients (0 during warm-up).
  double coefficient_norm() const;

  // Residual of the most recent sample (0 until estimates start).
  double last_residual() const { return last_residual_; }

  // Serializes the full scorer state to JSON; load() restores it exactly
  // (doubles round-trip bit-for-bit), so a restored scorer continues the
  // stream as if never interrupted.
  std::string save() const;
  static SdnmlScorer load(const std::string& json_text);

 private:
  SdnmlConfig cfg_;
  long t_ = 0;
  int lag_count_ = 0;
  std::vector<double> xbar_;  // newest-first lag vector (x_{t-1} ... x_{t-p})
  std::vector<double> vinv_;  // p*p row-major inverse statistics matrix
  std::vector<double> chi_;   // discounted cross moments
  std::vector<double> ahat_;  // fitted coefficients
  std::vector<double> u_;     // scratch: V^{-1} xbar
  double s_ = 0.0;
  double s_prev_ = 0.0;
  double last_residual_ = 0.0;
  bool have_estimate_ = false;
};

// Trailing mean: out[i] = mean(losses[i .. i+kappa-1]), so each output is the
// average of the kappa most recent losses at its position. Returns nullopt
// when fewer than kappa losses exist (the explicit insufficient-length
// signal). kappa must be >= 1; kappa == 1 returns the input unchanged.
std::optional<std::vector<double>> smooth_losses(std::span<const double> losses,
                                                 int kappa);

struct TwoLayerConfig {
  SdnmlConfig first;
  SdnmlConfig second;
  // Width of both smoothing stages.
  int kappa = 15;

  void validate() const;
  // Input windows needed before the first final score exists.
  long min_windows() const;
};

// Everything the two-stage scorer produced for one input series. Each value
// carries the 0-based index of the input window it scores, so downstream
// consumers can map scores back to wall-clock windows. When the input is
// shorter than min_windows, sufficient is false and all series are empty
// (never a silently truncated result).
struct ChangeScoreSeries {
  bool sufficient = false;
  long min_windows = 0;
  std::vector<double> first_losses;
  std::vector<std::size_t> first_index;
  std::vector<double> smoothed;
  std::vector<std::size_t> smoothed_index;
  std::vector<double> second_losses;
  std::vector<std::size_t> second_index;
  std::vector<double> scores;  // final change-point scores
  std::vector<std::size_t> score_index;
};

// Per-step internals captured when a diagnostics sink is passed to
// two_layer_score. code_length is NaN for steps that emitted none.
struct SdnmlDiagnosticRow {
  int layer = 0;
  long t = 0;
  double code_length = 0.0;
  double coefficient_norm = 0.0;
  double residual_sum = 0.0;
};

// Runs the full stack: code lengths of xs, trailing-mean smoothing, code
// lengths of the smoothed series, smoothing again. Identical to chaining the
// pieces by hand (bit-for-bit).
ChangeScoreSeries two_layer_score(std::span<const double> xs,
                                  const TwoLayerConfig& cfg,
                                  std::vector<SdnmlDiagnosticRow>* diagnostics = nullptr);

namespace detail {

// Given vinv = V^{-1} (p x p row-major) and a lag vector, computes
// c = r * xbar^T V^{-1} xbar and rewrites vinv to ((1-r)V + r xbar xbar^T)^{-1}
// by a rank-one correction. scratch must hold p doubles. Returns c.
double discounted_inverse_update(double* vinv, std::size_t p, const double* xbar,
                                 double r, double* scratch);

}  // namespace detail

}  // namespace linkanomaly
