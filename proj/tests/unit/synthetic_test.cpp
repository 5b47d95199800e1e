#include "doctest.h"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "linkanomaly/random.hpp"
#include "linkanomaly/synthetic.hpp"

using linkanomaly::Post;
using linkanomaly::SyntheticScenario;

namespace {

SyntheticScenario small_scenario() {
  SyntheticScenario sc;
  sc.seed = 7;
  sc.user_count = 20;
  sc.duration = 2.0 * 86400.0;
  sc.posts_per_user_per_day = 10.0;
  sc.emergence_time = 3.0 * 86400.0;  // past the end: pure baseline
  return sc;
}

}  // namespace

TEST_CASE("equal scenarios generate identical streams") {
  const auto a = linkanomaly::generate_synthetic_stream(small_scenario());
  const auto b = linkanomaly::generate_synthetic_stream(small_scenario());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].time == b[i].time);
    CHECK(a[i].user == b[i].user);
    CHECK(a[i].mentions == b[i].mentions);
  }

  SyntheticScenario other = small_scenario();
  other.seed = 8;
  const auto c = linkanomaly::generate_synthetic_stream(other);
  bool different = c.size() != a.size();
  for (std::size_t i = 0; !different && i < a.size(); ++i)
    different = a[i].time != c[i].time;
  CHECK(different);
}

TEST_CASE("the stream is time-ordered and in range") {
  const auto sc = small_scenario();
  const auto posts = linkanomaly::generate_synthetic_stream(sc);
  REQUIRE_FALSE(posts.empty());
  double prev = 0.0;
  for (const auto& p : posts) {
    CHECK(p.time >= prev);
    CHECK(p.time < sc.duration);
    CHECK_FALSE(p.user.empty());
    prev = p.time;
  }
}

TEST_CASE("post volume tracks the configured rates") {
  const auto sc = small_scenario();
  const auto posts = linkanomaly::generate_synthetic_stream(sc);
  // 20 users * 2 days * 10 posts/day = 400 expected, Poisson sd = 20.
  const double n = static_cast<double>(posts.size());
  CHECK(std::abs(n - 400.0) <= 100.0);

  // Mention counts are geometric with the configured mean.
  double mentions = 0.0;
  for (const auto& p : posts) mentions += static_cast<double>(p.mention_count());
  const double mean = mentions / n;
  CHECK(std::abs(mean - sc.mean_mentions) <= 0.3);
}

TEST_CASE("a unit rate multiplier leaves the post rate statistically flat") {
  SyntheticScenario sc = small_scenario();
  sc.duration = 4.0 * 86400.0;
  sc.emergence_time = 2.0 * 86400.0;
  sc.rate_multiplier = 1.0;

  const auto posts = linkanomaly::generate_synthetic_stream(sc);
  double before = 0.0;
  double after = 0.0;
  for (const auto& p : posts) {
    (p.time < sc.emergence_time ? before : after) += 1.0;
  }
  // Two-sample comparison of Poisson halves at the 1% level.
  const double z = (before - after) / std::sqrt(before + after);
  CHECK(std::abs(z) < 2.58);
}

TEST_CASE("with no affected users the emergence time is invisible") {
  SyntheticScenario sc = small_scenario();
  sc.duration = 4.0 * 86400.0;
  sc.emergence_time = 2.0 * 86400.0;
  sc.affected_fraction = 0.0;

  const auto posts = linkanomaly::generate_synthetic_stream(sc);
  REQUIRE_FALSE(posts.empty());
  for (const auto& p : posts) {
    for (const auto& v : p.mentions) CHECK(v[0] == 'u');
  }
}

TEST_CASE("the emergence effect boosts rates and mints novel mentionees") {
  SyntheticScenario sc = small_scenario();
  sc.duration = 4.0 * 86400.0;
  sc.emergence_time = 2.0 * 86400.0;
  sc.rate_multiplier = 3.0;
  sc.novel_prob = 0.5;

  const auto posts = linkanomaly::generate_synthetic_stream(sc);
  double before = 0.0;
  double after = 0.0;
  bool saw_novel = false;
  for (const auto& p : posts) {
    if (p.time < sc.emergence_time) {
      before += 1.0;
    } else {
      after += 1.0;
      for (const auto& v : p.mentions) saw_novel = saw_novel || v[0] == 'x';
    }
  }
  CHECK(after / before > 2.0);
  CHECK(after / before < 4.5);
  CHECK(saw_novel);
}

TEST_CASE("only the affected fraction changes behaviour") {
  SyntheticScenario sc = small_scenario();
  sc.duration = 4.0 * 86400.0;
  sc.emergence_time = 2.0 * 86400.0;
  sc.affected_fraction = 0.5;  // users u0..u9 affected
  sc.novel_prob = 0.9;

  const auto posts = linkanomaly::generate_synthetic_stream(sc);
  std::set<std::string> novel_authors;
  for (const auto& p : posts) {
    for (const auto& v : p.mentions) {
      if (v[0] == 'x') novel_authors.insert(p.user);
    }
  }
  CHECK_FALSE(novel_authors.empty());
  for (const auto& author : novel_authors) {
    const int uid = std::stoi(author.substr(1));
    CHECK(uid < 10);
  }
}

TEST_CASE("mentions stay inside the user universe before the change") {
  const auto sc = small_scenario();
  const auto posts = linkanomaly::generate_synthetic_stream(sc);
  for (const auto& p : posts) {
    for (const auto& v : p.mentions) {
      REQUIRE(v[0] == 'u');
      const int uid = std::stoi(v.substr(1));
      CHECK(uid >= 0);
      CHECK(uid < static_cast<int>(sc.user_count));
    }
  }
}

TEST_CASE("scenario validation") {
  SyntheticScenario sc = small_scenario();
  sc.user_count = 0;
  CHECK_THROWS_AS(linkanomaly::generate_synthetic_stream(sc), std::invalid_argument);
  sc = small_scenario();
  sc.duration = 0.0;
  CHECK_THROWS_AS(linkanomaly::generate_synthetic_stream(sc), std::invalid_argument);
  sc = small_scenario();
  sc.novel_prob = 1.5;
  CHECK_THROWS_AS(linkanomaly::generate_synthetic_stream(sc), std::invalid_argument);
  sc = small_scenario();
  sc.rate_multiplier = 0.0;
  CHECK_THROWS_AS(linkanomaly::generate_synthetic_stream(sc), std::invalid_argument);
  sc = small_scenario();
  sc.affected_fraction = -0.1;
  CHECK_THROWS_AS(linkanomaly::generate_synthetic_stream(sc), std::invalid_argument);
}

TEST_CASE("percentile helper uses nearest-rank semantics") {
  const std::vector<double> values{5.0, 1.0, 3.0, 2.0, 4.0};
  CHECK(linkanomaly::nearest_rank_percentile(values, 0.9) == 5.0);
  CHECK(linkanomaly::nearest_rank_percentile(values, 0.5) == 3.0);
  CHECK(linkanomaly::nearest_rank_percentile(values, 0.2) == 1.0);
  CHECK(linkanomaly::nearest_rank_percentile(values, 1.0) == 5.0);
  CHECK(linkanomaly::nearest_rank_percentile({7.0}, 0.5) == 7.0);
  CHECK_THROWS_AS(linkanomaly::nearest_rank_percentile({}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(linkanomaly::nearest_rank_percentile(values, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(linkanomaly::nearest_rank_percentile(values, 1.1), std::invalid_argument);
}
