#include "doctest.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "linkanomaly/dto.hpp"
#include "linkanomaly/random.hpp"

using linkanomaly::DtoConfig;
using linkanomaly::DtoDetector;
using linkanomaly::ThresholdHistogram;

namespace {

DtoConfig default_config() {
  DtoConfig cfg;  // bins 20, rho 0.05, smoothing 0.01, discount 0.005
  return cfg;
}

double distribution_sum(const ThresholdHistogram& h) {
  double sum = 0.0;
  for (double q : h.distribution()) sum += q;
  return sum;
}

}  // namespace

TEST_CASE("configuration validation") {
  DtoConfig cfg = default_config();
  CHECK_NOTHROW(cfg.validate());

  cfg.bins = 2;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = default_config();
  cfg.rho = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = default_config();
  cfg.rho = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = default_config();
  cfg.smoothing = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = default_config();
  cfg.discount = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  CHECK_THROWS_AS(ThresholdHistogram(default_config(), 5.0, 5.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(ThresholdHistogram(default_config(), 5.0, 4.0),
                  std::invalid_argument);
}

TEST_CASE("bin indexing covers both tails and the interior cells") {
  // 20 bins over [0, 18): 18 interior cells of width 1.
  const ThresholdHistogram h(default_config(), 0.0, 18.0);
  CHECK(h.bin_index(-0.001) == 1);
  CHECK(h.bin_index(-1e9) == 1);
  CHECK(h.bin_index(0.0) == 2);
  CHECK(h.bin_index(0.999) == 2);
  CHECK(h.bin_index(1.0) == 3);
  CHECK(h.bin_index(17.999) == 19);
  CHECK(h.bin_index(18.0) == 20);
  CHECK(h.bin_index(1e9) == 20);
  CHECK_THROWS_AS(h.bin_index(std::nan("")), std::invalid_argument);
}

TEST_CASE("a fresh histogram is uniform after smoothing") {
  const ThresholdHistogram h(default_config(), 0.0, 18.0);
  const auto q = h.distribution();
  REQUIRE(q.size() == 20);
  for (double qi : q) CHECK(qi == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(distribution_sum(h) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("threshold sits one cell above the tail quantile") {
  // Uniform distribution, rho = 0.05: 19 of 20 bins reach the 95% mass, so
  // l = 19 and the threshold is a + (19+1) * width = 20, one cell past b.
  const ThresholdHistogram uniform(default_config(), 0.0, 18.0);
  CHECK(uniform.threshold() == doctest::Approx(20.0).epsilon(1e-12));

  // 11 bins over [0, 9], rho = 1/11: ten of eleven uniform bins suffice, so
  // l = 10 and the threshold is 0 + (10+1) * 1 = 11.
  DtoConfig eleven = default_config();
  eleven.bins = 11;
  eleven.rho = 1.0 / 11.0;
  const ThresholdHistogram h11(eleven, 0.0, 9.0);
  CHECK(h11.threshold() == doctest::Approx(11.0).epsilon(1e-12));

  // Nearly all mass in the low tail bin: l = 1, threshold = a + 2 * width.
  DtoConfig concentrated = default_config();
  concentrated.smoothing = 1e-6;
  concentrated.discount = 0.01;
  ThresholdHistogram low(concentrated, 0.0, 18.0);
  for (int i = 0; i < 1500; ++i) low.update(-5.0);
  CHECK(low.threshold() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("update applies forgetting then adds the new mass") {
  ThresholdHistogram h(default_config(), 0.0, 18.0);
  h.update(5.5);  // lands in bin 7 (cell [5, 6))
  const auto q = h.distribution();
  const double hit = (0.05 * 0.995 + 0.005 + 0.01) / 1.2;
  const double other = (0.05 * 0.995 + 0.01) / 1.2;
  CHECK(q[6] == doctest::Approx(hit).epsilon(1e-12));
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i != 6) CHECK(q[i] == doctest::Approx(other).epsilon(1e-12));
  }
  CHECK_THROWS_AS(h.update(std::nan("")), std::invalid_argument);
}

TEST_CASE("the distribution stays normalized through heavy use") {
  linkanomaly::Rng rng(71);
  ThresholdHistogram h(default_config(), -2.0, 7.0);
  for (int i = 0; i < 100000; ++i) h.update(rng.uniform01() * 12.0 - 3.0);
  CHECK(std::abs(distribution_sum(h) - 1.0) <= 1e-12);
}

TEST_CASE("repeated hits push a bin's mass up monotonically") {
  ThresholdHistogram h(default_config(), 0.0, 18.0);
  double prev = h.distribution()[0];
  for (int i = 0; i < 100; ++i) {
    h.update(-1.0);  // low tail, bin 1
    const double q1 = h.distribution()[0];
    CHECK(q1 >= prev);
    prev = q1;
  }
  // Converging toward the fixed point (1 + smoothing) / (1 + bins*smoothing).
  CHECK(prev < (1.0 + 0.01) / 1.2);
}

TEST_CASE("larger tail mass never raises the threshold") {
  linkanomaly::Rng rng(73);
  std::vector<double> scores;
  for (int i = 0; i < 500; ++i) scores.push_back(rng.uniform01() * 10.0);

  double prev = std::numeric_limits<double>::infinity();
  for (const double rho : {0.01, 0.02, 0.05, 0.1, 0.2, 0.3}) {
    DtoConfig cfg = default_config();
    cfg.rho = rho;
    ThresholdHistogram h(cfg, 0.0, 10.0);
    for (double s : scores) h.update(s);
    const double eta = h.threshold();
    CHECK(eta <= prev);
    prev = eta;
  }
}

TEST_CASE("alarms are judged before the score enters the histogram") {
  ThresholdHistogram h(default_config(), 0.0, 18.0);
  const double before = h.threshold();
  const auto result = h.step(100.0);
  CHECK(result.threshold == before);
  CHECK(result.alarm);
  // Only after the update does the huge score lift the threshold.
  CHECK(h.threshold() > before);
  CHECK(h.threshold() == doctest::Approx(21.0).epsilon(1e-12));
}

TEST_CASE("alarm comparison includes the threshold itself") {
  ThresholdHistogram h(default_config(), 0.0, 18.0);
  const double eta = h.threshold();
  CHECK(h.alarm(eta));
  CHECK_FALSE(h.alarm(std::nextafter(eta, -1e9)));
}

TEST_CASE("detector calibrates its range from the warm-up scores") {
  DtoDetector det(default_config(), 3);

  const auto d1 = det.step(1.0);
  CHECK_FALSE(d1.threshold.has_value());
  CHECK_FALSE(d1.alarm);
  CHECK_FALSE(det.calibrated());

  det.step(3.0);
  const auto d3 = det.step(2.0);
  CHECK_FALSE(d3.threshold.has_value());
  CHECK(det.calibrated());
  CHECK(det.histogram().lower_edge() == 1.0);
  CHECK(det.histogram().upper_edge() == 3.0);

  // Post-calibration scores get a real decision.
  const auto d4 = det.step(2.5);
  REQUIRE(d4.threshold.has_value());
  CHECK_FALSE(d4.alarm);
  const auto d5 = det.step(1000.0);
  CHECK(d5.alarm);
}

TEST_CASE("warm-up scores shape the histogram they calibrated") {
  // Replayed warm-up scores must appear as updates: feeding the same value
  // repeatedly concentrates mass in its bin.
  DtoConfig cfg = default_config();
  DtoDetector det(cfg, 50);
  for (int i = 0; i < 49; ++i) det.step(5.0);
  det.step(6.0);  // completes warm-up; range [5, 6]
  REQUIRE(det.calibrated());
  const auto q = det.histogram().distribution();
  CHECK(q[1] > 0.2);  // bin holding 5.0 got 49 replayed updates
}

TEST_CASE("identical warm-up scores widen into a usable range") {
  DtoDetector det(default_config(), 4);
  for (int i = 0; i < 4; ++i) det.step(7.0);
  REQUIRE(det.calibrated());
  CHECK(det.histogram().lower_edge() == 7.0);
  CHECK(det.histogram().upper_edge() == 8.0);
}

TEST_CASE("fixed edges skip calibration entirely") {
  DtoDetector det(default_config(), 0, 0.0, 18.0);
  CHECK(det.calibrated());
  const auto d = det.step(1.0);
  REQUIRE(d.threshold.has_value());
  CHECK(*d.threshold == doctest::Approx(20.0).epsilon(1e-12));

  CHECK_THROWS_AS(DtoDetector(default_config(), 5, 1.0, std::nullopt),
                  std::invalid_argument);
  CHECK_THROWS_AS(DtoDetector(default_config(), 0), std::invalid_argument);
}

TEST_CASE("detector rejects NaN scores in every phase") {
  DtoDetector warming(default_config(), 5);
  CHECK_THROWS_AS(warming.step(std::nan("")), std::invalid_argument);

  DtoDetector fixed(default_config(), 0, 0.0, 1.0);
  CHECK_THROWS_AS(fixed.step(std::nan("")), std::invalid_argument);
}
