#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace linkanomaly {

// Deterministic sampling helpers over mt19937_64. The engine's output stream
// is pinned by the standard; the draws below are hand-inverted so sequences
// are identical across standard libraries and platforms, which the frozen
// test values and byte-identical output runs rely on.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Exponential with the given rate (inverse CDF).
  double exponential(double rate) {
    return -std::log(1.0 - uniform01()) / rate;
  }

  // Geometric on {0,1,2,...} with success probability theta:
  // P(k) = (1-theta)^k * theta.
  std::uint64_t geometric(double theta) {
    if (theta >= 1.0) return 0;
    const double u = uniform01();
    return static_cast<std::uint64_t>(std::floor(std::log(1.0 - u) / std::log(1.0 - theta)));
  }

  // Index draw from unnormalized weights via their cumulative sums.
  // cumulative must be non-empty and non-decreasing with a positive back().
  std::size_t categorical(std::span<const double> cumulative) {
    const double u = uniform01() * cumulative.back();
    std::size_t lo = 0, hi = cumulative.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cumulative[mid] > u) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return lo;
  }

 private:
  std::mt19937_64 engine_;
};

// Nearest-rank percentile: smallest value v such that at least ceil(q*n) of
// the n values are <= v. q in (0, 1]; values must be non-empty.
double nearest_rank_percentile(std::vector<double> values, double q);

}  // namespace linkanomaly
