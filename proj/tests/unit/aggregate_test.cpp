#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "linkanomaly/aggregate.hpp"
#include "linkanomaly/random.hpp"
#include "oracles.hpp"

using linkanomaly::ScoreAggregator;
using linkanomaly::ScoredPost;
using linkanomaly::ScoreSeries;

TEST_CASE("aggregation divides window sums by the window length") {
  ScoreAggregator agg(60.0, 0.0);
  agg.add(0.0, 3.0);
  agg.add(30.0, 3.0);
  const ScoreSeries series = std::move(agg).finish();
  REQUIRE(series.values.size() == 1);
  CHECK(series.values[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(series.window_start(0) == 0.0);
}

TEST_CASE("window boundaries are half-open") {
  ScoreAggregator agg(60.0, 0.0);
  agg.add(59.9, 6.0);
  agg.add(60.0, 6.0);
  const ScoreSeries series = std::move(agg).finish();
  REQUIRE(series.values.size() == 2);
  CHECK(series.values[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(series.values[1] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(series.window_start(1) == 60.0);
}

TEST_CASE("windows without posts hold zero") {
  ScoreAggregator agg(60.0, 0.0);
  agg.add(0.0, 1.0);
  agg.add(180.0, 2.0);
  const ScoreSeries series = std::move(agg).finish();
  REQUIRE(series.values.size() == 4);
  CHECK(series.values[0] == doctest::Approx(1.0 / 60.0).epsilon(1e-12));
  CHECK(series.values[1] == 0.0);
  CHECK(series.values[2] == 0.0);
  CHECK(series.values[3] == doctest::Approx(2.0 / 60.0).epsilon(1e-12));
}

TEST_CASE("a nonzero origin shifts the grid") {
  ScoreAggregator agg(10.0, 100.0);
  agg.add(100.0, 5.0);
  agg.add(125.0, 5.0);
  const ScoreSeries series = std::move(agg).finish();
  REQUIRE(series.values.size() == 3);
  CHECK(series.values[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(series.values[2] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(series.window_start(2) == 120.0);
}

TEST_CASE("aggregation conserves score mass and matches brute-force binning") {
  linkanomaly::Rng rng(7);
  const double tau = 7.5;
  const double origin = 12.0;
  std::vector<ScoredPost> posts;
  double t = origin;
  double total = 0.0;
  for (int i = 0; i < 500; ++i) {
    t += rng.exponential(0.2);
    const double score = rng.uniform01() * 5.0;
    posts.push_back({t, score});
    total += score;
  }

  const ScoreSeries series = linkanomaly::aggregate_scores(posts, tau, origin);

  double mass = 0.0;
  for (double v : series.values) mass += v;
  CHECK(mass * tau == doctest::Approx(total).epsilon(1e-9));

  std::vector<double> scanned(series.values.size(), 0.0);
  for (const auto& p : posts) {
    const auto j = oracles::window_by_scan(p.time, origin, tau, series.values.size());
    scanned[j] += p.score;
  }
  for (std::size_t j = 0; j < scanned.size(); ++j) {
    CHECK(series.values[j] ==
          doctest::Approx(scanned[j] / tau).epsilon(1e-12));
  }
}

TEST_CASE("aggregation validates its inputs") {
  CHECK_THROWS_AS(ScoreAggregator(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ScoreAggregator(-1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ScoreAggregator(60.0, 0.0, -1.0), std::invalid_argument);

  ScoreAggregator agg(60.0, 0.0);
  CHECK_THROWS_AS(agg.add(std::nan(""), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(agg.add(-0.5, 1.0), std::invalid_argument);

  agg.add(100.0, 1.0);
  CHECK_THROWS_AS(agg.add(99.0, 1.0), std::invalid_argument);

  // Slack admits mild reordering; the post still bins by its own time.
  ScoreAggregator slack(60.0, 0.0, 10.0);
  slack.add(100.0, 1.0);
  slack.add(95.0, 2.0);
  const ScoreSeries series = std::move(slack).finish();
  REQUIRE(series.values.size() == 2);
  CHECK(series.values[1] == doctest::Approx(3.0 / 60.0).epsilon(1e-12));
}
