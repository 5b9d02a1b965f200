#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "pilotmesh/qoe/experiment.hpp"
#include "pilotmesh/qoe/qoe.hpp"
#include "pilotmesh/sim/scenario.hpp"

using namespace pilotmesh;
using namespace pilotmesh::qoe;

TEST_CASE("us_overall examples") {
  for (std::size_t k : {1, 2, 7, 40, 41, 500}) CHECK(us_overall(std::vector<int>(k, 2)) == 2.0);
  CHECK(us_overall({2, -2, 2}) == doctest::Approx(10.0 / 11.0));
  CHECK(us_overall({-2, 2}) == doctest::Approx(-2.0 / 3.0));
  CHECK(us_overall({2, 2, -2, -2}) == doctest::Approx(22.0 / 25.0));
  CHECK(us_overall({1, 1, -2}) == doctest::Approx(5.0 / 11.0));
  CHECK(us_overall({0}) == 0.0);
  CHECK_THROWS_AS(us_overall(std::vector<int>{}), std::invalid_argument);
  CHECK_THROWS_AS(us_overall({3}), std::out_of_range);
}

TEST_CASE("report form") {
  const auto r = SatisfactionReport::from_ratings({2, -2, 2});
  REQUIRE(r.params.size() == 3);
  CHECK(r.params[0].name == kParameterCatalog[0]);
  CHECK(r.params[2].rating == Rating(2));
  CHECK(us_overall(r) == doctest::Approx(10.0 / 11.0));
  CHECK_THROWS_AS(us_overall(SatisfactionReport{}), std::invalid_argument);
  CHECK_THROWS_AS(Rating(-3), std::out_of_range);
}

TEST_CASE("harmonic numbers") {
  CHECK(harmonic_number(1) == 1.0);
  CHECK(harmonic_number(3) == doctest::Approx(11.0 / 6.0));
  CHECK(harmonic_number(10000) == doctest::Approx(9.787606036044382).epsilon(1e-15));
  CHECK(harmonic_number(0) == 0.0);
}

TEST_CASE("us_overall stays in range") {
  sim::Rng rng(11);
  for (int n = 0; n < 2000; ++n) {
    std::vector<int> r(1 + rng.uniform_int(0, 60));
    for (int& x : r) x = static_cast<int>(rng.uniform_int(0, 4)) - 2;
    const double u = us_overall(r);
    REQUIRE(u >= -2.0);
    REQUIRE(u <= 2.0);
    const double lo = *std::min_element(r.begin(), r.end());
    const double hi = *std::max_element(r.begin(), r.end());
    REQUIRE(u >= lo - 1e-12);
    REQUIRE(u <= hi + 1e-12);
  }
}

TEST_CASE("moving a higher rating to a better rank never lowers the score") {
  sim::Rng rng(12);
  for (int n = 0; n < 2000; ++n) {
    std::vector<int> r(2 + rng.uniform_int(0, 30));
    for (int& x : r) x = static_cast<int>(rng.uniform_int(0, 4)) - 2;
    const auto i = rng.uniform_int(0, r.size() - 2);
    const auto j = rng.uniform_int(i + 1, r.size() - 1);
    if (r[i] >= r[j]) continue;
    auto swapped = r;
    std::swap(swapped[i], swapped[j]);
    REQUIRE(us_overall(swapped) >= us_overall(r));
  }
}

TEST_CASE("rate_percentage") {
  CHECK(rate_percentage(85).value() == 2);
  CHECK(rate_percentage(50).value() == 0);
  CHECK(rate_percentage(10).value() == -2);
  CHECK(rate_percentage(0).value() == -2);
  CHECK(rate_percentage(19.999).value() == -2);
  CHECK(rate_percentage(20).value() == -1);
  CHECK(rate_percentage(40).value() == -1);
  CHECK(rate_percentage(40.001).value() == 0);
  CHECK(rate_percentage(60).value() == 0);
  CHECK(rate_percentage(80).value() == 1);
  CHECK(rate_percentage(80.001).value() == 2);
  CHECK(rate_percentage(100).value() == 2);
  CHECK_THROWS_AS(rate_percentage(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(rate_percentage(100.1), std::invalid_argument);
  CHECK_THROWS_AS(rate_percentage(std::nan("")), std::invalid_argument);

  RatingPolicy p;
  p.bounds = {10, 30, 50, 70};
  CHECK(rate_percentage(60, p).value() == 1);
  p.bounds = {10, 5, 50, 70};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("rate_percentage is monotone") {
  int prev = -2;
  for (int i = 0; i <= 100000; ++i) {
    const int r = rate_percentage(i / 1000.0).value();
    REQUIRE(r >= prev);
    prev = r;
  }
}

TEST_CASE("half-top claims") {
  const auto c1 = half_top_claim(HalfTop::extreme, 4, true);
  CHECK(c1.prefix_length == 2);
  CHECK(c1.prefix_levels == std::vector<int>{2});
  CHECK(c1.sign == 1);
  CHECK(half_top_claim(HalfTop::extreme, 1, true).prefix_length == 1);
  const auto c2 = half_top_claim(HalfTop::same_sign, 3, false);
  CHECK(c2.prefix_length == 2);
  CHECK(c2.sign == -1);

  CHECK(check_half_top_dominance(HalfTop::extreme, {2, 2, -2, -2}) == 1);
  CHECK(check_half_top_dominance(HalfTop::extreme, {2}) == 1);
  CHECK(check_half_top_dominance(HalfTop::extreme, {-2, -2, 2}) == -1);
  CHECK(check_half_top_dominance(HalfTop::extreme, {2, 1, 2, 2}) == 0);
  CHECK(check_half_top_dominance(HalfTop::same_sign, {1, 1, -2}) == 1);
  CHECK(check_half_top_dominance(HalfTop::same_sign, {-1, -2, 2}) == -1);
  CHECK(check_half_top_dominance(HalfTop::same_sign, {1, 0, 2}) == 0);
}

TEST_CASE("extreme half-top claim holds exhaustively") {
  for (std::size_t k = 1; k <= 10; ++k) {
    for (bool positive : {true, false}) {
      const auto r = verify_half_top(HalfTop::extreme, k, positive);
      CHECK(r.cases > 0);
      CHECK(r.counterexamples == 0);
    }
  }
}

TEST_CASE("same-sign half-top claim holds exhaustively except at k = 2") {
  for (std::size_t k = 1; k <= 10; ++k) {
    if (k == 2) continue;
    for (bool positive : {true, false}) {
      const auto r = verify_half_top(HalfTop::same_sign, k, positive);
      CHECK(r.cases > 0);
      CHECK(r.counterexamples == 0);
    }
  }
}

TEST_CASE("same-sign half-top claim fails at k = 2") {
  const auto pos = verify_half_top(HalfTop::same_sign, 2, true);
  CHECK(pos.cases == 10);
  CHECK(pos.counterexamples == 1);
  REQUIRE(pos.examples.size() == 1);
  CHECK(pos.examples[0] == std::vector<int>{1, -2});
  CHECK(us_overall({1, -2}) == 0.0);
  const auto neg = verify_half_top(HalfTop::same_sign, 2, false);
  CHECK(neg.counterexamples == 1);
  CHECK(neg.examples[0] == std::vector<int>{-1, 2});
}

TEST_CASE("random harmonic experiment examples") {
  const auto zero = random_harmonic_experiment(50, 100, 3, RatingDistribution{0, 0, 1, 0, 0});
  for (double s : zero.samples) CHECK(s == 0.0);
  CHECK(zero.abs_max == 0.0);

  const auto one = random_harmonic_experiment(1, 20000, 4);
  for (double s : one.samples) REQUIRE(s == std::round(s));
  CHECK(std::abs(one.mean) < 0.05);
  CHECK(one.stddev == doctest::Approx(std::sqrt(2.0)).epsilon(0.03));

  CHECK_THROWS_AS(random_harmonic_experiment(0, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(random_harmonic_experiment(5, 10, 1, RatingDistribution{0.5, 0.5, 0.5, 0, 0}),
                  std::invalid_argument);
}

TEST_CASE("random harmonic experiment is deterministic across thread counts") {
  const auto a = random_harmonic_experiment(300, 64, 9, kUniformRatings, 1);
  const auto b = random_harmonic_experiment(300, 64, 9, kUniformRatings, 7);
  CHECK(a.samples == b.samples);
  CHECK(a.mean == b.mean);
  CHECK(a.abs_q50 <= a.abs_q90);
  CHECK(a.abs_q90 <= a.abs_q99);
  CHECK(a.abs_q99 <= a.abs_max);
  CHECK(a.fraction_below(2.01) == 1.0);
  CHECK(trial_seed(9, 0) != trial_seed(9, 1));
}
