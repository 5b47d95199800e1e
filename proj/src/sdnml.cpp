#include "linkanomaly/sdnml.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "linkanomaly/simd/kernels.hpp"
#include "json.hpp"

namespace linkanomaly {

void SdnmlConfig::validate() const {
  if (order < 1) throw std::invalid_argument("autoregressive order must be >= 1");
  if (!(discount > 0.0) || !(discount < 1.0))
    throw std::invalid_argument("discount must lie in (0, 1)");
  if (warmup_margin < 0)
    throw std::invalid_argument("warmup margin must be >= 0");
  if (!(ridge > 0.0)) throw std::invalid_argument("ridge seed must be positive");
  if (variance_floor < 0.0)
    throw std::invalid_argument("variance floor must be >= 0");
}

SdnmlScorer::SdnmlScorer(SdnmlConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  const auto p = static_cast<std::size_t>(cfg_.order);
  xbar_.assign(p, 0.0);
  vinv_.assign(p * p, 0.0);
  chi_.assign(p, 0.0);
  ahat_.assign(p, 0.0);
  u_.assign(p, 0.0);
  // V starts as ridge * I, so its inverse is I / ridge.
  for (std::size_t i = 0; i < p; ++i) vinv_[i * p + i] = 1.0 / cfg_.ridge;
}

namespace detail {

double discounted_inverse_update(double* vinv, std::size_t p, const double* xbar,
                                 double r, double* scratch) {
  simd::matvec(vinv, p, xbar, scratch);
  double c = r * simd::dot(xbar, scratch, p);
  // c is a quadratic form in a positive definite matrix; a negative value can
  // only come from accumulated rounding. Clamp instead of propagating it into
  // the denominators.
  c = std::max(c, 0.0);
  const double denom = (1.0 - r) * (1.0 - r + c);
  simd::sym_scale_rank1(vinv, p, 1.0 / (1.0 - r), -r / denom, scratch);
  return c;
}

}  // namespace detail

std::optional<double> SdnmlScorer::step(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("sample must be finite");
  ++t_;
  std::optional<double> out;
  const auto p = static_cast<std::size_t>(cfg_.order);
  const double r = cfg_.discount;
  const long t0 = cfg_.warmup_end();

  if (t_ > t0) {
    // Statistics update for time t; xbar_ still holds (x_{t-1} ... x_{t-p}).
    const double c = detail::discounted_inverse_update(vinv_.data(), p,
                                                       xbar_.data(), r, u_.data());
    simd::axpby(chi_.data(), xbar_.data(), p, 1.0 - r, r * x);
    simd::matvec(vinv_.data(), p, chi_.data(), ahat_.data());
    have_estimate_ = true;

    const double residual = x - simd::dot(ahat_.data(), xbar_.data(), p);
    last_residual_ = residual;
    s_prev_ = s_;
    s_ += residual * residual;

    const long q = t_ - t0;
    if (q >= 2) {
      const double s1 = s_ + cfg_.variance_floor;
      const double s0 = s_prev_ + cfg_.variance_floor;
      // log(1 - d_t) with d_t = c/(1-r+c), formed from its definition to stay
      // accurate when c is large and d_t is close to 1.
      const double log_one_minus_d = std::log(1.0 - r) - std::log(1.0 - r + c);
      const double qd = static_cast<double>(q);
      const double log_k = 0.5 * std::log(std::numbers::pi) - log_one_minus_d +
                           std::lgamma(0.5 * (qd - 1.0)) - std::lgamma(0.5 * qd);
      out = log_k + 0.5 * qd * std::log(s1) - 0.5 * (qd - 1.0) * std::log(s0);
    }
  }

  // Shift the lag buffer: newest sample to the front.
  if (p > 1) std::rotate(xbar_.rbegin(), xbar_.rbegin() + 1, xbar_.rend());
  xbar_[0] = x;
  if (lag_count_ < cfg_.order) ++lag_count_;
  return out;
}

std::span<const double> SdnmlScorer::coefficients() const {
  if (!have_estimate_) return {};
  return {ahat_.data(), ahat_.size()};
}

double SdnmlScorer::coefficient_norm() const {
  if (!have_estimate_) return 0.0;
  return std::sqrt(simd::dot(ahat_.data(), ahat_.data(), ahat_.size()));
}

std::string SdnmlScorer::save() const {
  nlohmann::json j;
  j["order"] = cfg_.order;
  j["discount"] = cfg_.discount;
  j["warmup_margin"] = cfg_.warmup_margin;
  j["ridge"] = cfg_.ridge;
  j["variance_floor"] = cfg_.variance_floor;
  j["t"] = t_;
  j["lag_count"] = lag_count_;
  j["xbar"] = xbar_;
  j["vinv"] = vinv_;
  j["chi"] = chi_;
  j["ahat"] = ahat_;
  j["s"] = s_;
  j["s_prev"] = s_prev_;
  j["last_residual"] = last_residual_;
  j["have_estimate"] = have_estimate_;
  return j.dump();
}

SdnmlScorer SdnmlScorer::load(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  SdnmlConfig cfg;
  cfg.order = j.at("order").get<int>();
  cfg.discount = j.at("discount").get<double>();
  cfg.warmup_margin = j.at("warmup_margin").get<int>();
  cfg.ridge = j.at("ridge").get<double>();
  cfg.variance_floor = j.at("variance_floor").get<double>();
  SdnmlScorer scorer(cfg);
  scorer.t_ = j.at("t").get<long>();
  scorer.lag_count_ = j.at("lag_count").get<int>();
  scorer.xbar_ = j.at("xbar").get<std::vector<double>>();
  scorer.vinv_ = j.at("vinv").get<std::vector<double>>();
  scorer.chi_ = j.at("chi").get<std::vector<double>>();
  scorer.ahat_ = j.at("ahat").get<std::vector<double>>();
  scorer.s_ = j.at("s").get<double>();
  scorer.s_prev_ = j.at("s_prev").get<double>();
  scorer.last_residual_ = j.at("last_residual").get<double>();
  scorer.have_estimate_ = j.at("have_estimate").get<bool>();
  const auto p = static_cast<std::size_t>(cfg.order);
  if (scorer.xbar_.size() != p || scorer.vinv_.size() != p * p ||
      scorer.chi_.size() != p || scorer.ahat_.size() != p) {
    throw std::invalid_argument("scorer state does not match its configuration");
  }
  return scorer;
}

std::optional<std::vector<double>> smooth_losses(std::span<const double> losses,
                                                 int kappa) {
  if (kappa < 1) throw std::invalid_argument("smoothing width must be >= 1");
  const auto k = static_cast<std::size_t>(kappa);
  if (losses.size() < k) return std::nullopt;
  std::vector<double> out;
  out.reserve(losses.size() - k + 1);
  for (std::size_t i = 0; i + k <= losses.size(); ++i) {
    // Plain per-window summation; kappa is small and this keeps each output
    // independent of its neighbours' rounding.
    double acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) acc += losses[i + j];
    out.push_back(acc / static_cast<double>(kappa));
  }
  return out;
}

void TwoLayerConfig::validate() const {
  first.validate();
  second.validate();
  if (kappa < 1) throw std::invalid_argument("smoothing width must be >= 1");
}

long TwoLayerConfig::min_windows() const {
  // Unwinding the stack: one final score needs kappa second-layer losses,
  // which need second.warmup_end()+1+kappa smoothed values, which need
  // kappa-1 extra first-layer losses, which lag the input by
  // first.warmup_end()+1.
  return first.warmup_end() + 1 + second.warmup_end() + 1 + 2 * (kappa - 1) + 1;
}

namespace {

struct LayerOutput {
  std::vector<double> losses;
  std::vector<std::size_t> index;
};

LayerOutput run_layer(std::span<const double> xs,
                      std::span<const std::size_t> xs_index, const SdnmlConfig& cfg,
                      int layer, std::vector<SdnmlDiagnosticRow>* diagnostics) {
  LayerOutput out;
  SdnmlScorer scorer(cfg);
  // Stands in while a restarted scorer re-warms; empty until the first
  // finite loss, so the initial warm-up still emits nothing.
  std::optional<double> carry;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    auto loss = scorer.step(xs[i]);
    if (loss && !std::isfinite(*loss)) {
      // A zero-variance stretch much longer than the effective window
      // overflows the discounted statistics. Restart estimation and hold
      // the last finite loss until the fresh scorer warms up.
      scorer = SdnmlScorer(cfg);
      loss = scorer.step(xs[i]);
    }
    if (!loss && carry) loss = carry;
    if (diagnostics) {
      diagnostics->push_back({layer, scorer.samples_seen(),
                              loss ? *loss : std::nan(""),
                              scorer.coefficient_norm(), scorer.residual_sum()});
    }
    if (loss) {
      carry = *loss;
      out.losses.push_back(*loss);
      out.index.push_back(xs_index[i]);
    }
  }
  return out;
}

}  // namespace

ChangeScoreSeries two_layer_score(std::span<const double> xs,
                                  const TwoLayerConfig& cfg,
                                  std::vector<SdnmlDiagnosticRow>* diagnostics) {
  cfg.validate();
  ChangeScoreSeries out;
  out.min_windows = cfg.min_windows();
  const auto k = static_cast<std::size_t>(cfg.kappa);

  std::vector<std::size_t> xs_index(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs_index[i] = i;

  LayerOutput first = run_layer(xs, xs_index, cfg.first, 1, diagnostics);
  out.first_losses = first.losses;
  out.first_index = first.index;

  const auto smoothed = smooth_losses(first.losses, cfg.kappa);
  if (!smoothed) return out;
  out.smoothed = *smoothed;
  // A smoothed value sits at the index of the newest loss it averages.
  out.smoothed_index.assign(first.index.begin() + (k - 1), first.index.end());

  LayerOutput second =
      run_layer(out.smoothed, out.smoothed_index, cfg.second, 2, diagnostics);
  out.second_losses = second.losses;
  out.second_index = second.index;

  const auto final_scores = smooth_losses(second.losses, cfg.kappa);
  if (!final_scores) return out;
  out.scores = *final_scores;
  out.score_index.assign(second.index.begin() + (k - 1), second.index.end());
  out.sufficient = !out.scores.empty();
  return out;
}

}  // namespace linkanomaly
