#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pilotmesh::qoe {

/// ACR level in {-2, -1, 0, 1, 2}.
class Rating {
 public:
  Rating() = default;
  /// Throws std::out_of_range outside [-2, 2].
  explicit Rating(int v);
  int value() const { return value_; }

  friend bool operator==(const Rating&, const Rating&) = default;
  friend auto operator<=>(const Rating&, const Rating&) = default;

 private:
  int value_ = 0;
};

struct RatedParam {
  std::string name;
  Rating rating;
};

/// Parameters in preference order; position i (0-based) has rank i + 1.
struct SatisfactionReport {
  std::vector<RatedParam> params;

  static SatisfactionReport from_ratings(const std::vector<int>& ratings);
};

/// Harmonic-rank weighted mean: (sum US_i / i) / (sum 1 / i). Exact integer
/// weights up to k = 40, compensated summation beyond. Throws std::invalid_argument on an empty list.
double us_overall(const std::vector<int>& ratings);
double us_overall(const SatisfactionReport& report);

/// H_k with compensated summation.
double harmonic_number(std::size_t k);

/// Bucket bounds b0 < b1 < b2 < b3: pct < b0 is -2, b0 <= pct <= b1 is -1,
/// then each (b_i, b_i+1] interval one level higher, pct > b3 is 2.
struct RatingPolicy {
  std::array<double, 4> bounds{20.0, 40.0, 60.0, 80.0};

  void validate() const;
};

/// Throws std::invalid_argument outside [0, 100] or for NaN.
Rating rate_percentage(double pct, const RatingPolicy& policy = {});

/// Parameter catalog in default preference order.
inline constexpr std::array<std::string_view, 9> kParameterCatalog{
    "internet_free_access", "chunk_access_time", "energy",          "rank_search",       "keyword_search",
    "target_hop_distance",  "d2d_connect_time",  "pilot_hop_distance", "join_time",
};

enum class HalfTop { extreme, same_sign };

/// What a half-top claim asserts for k ratings whose prefix satisfies its hypothesis.
struct HalfTopClaim {
  std::size_t prefix_length = 0;
  std::vector<int> prefix_levels;  ///< allowed ratings for each prefix position
  int sign = 0;                    ///< +1 or -1
};

/// extreme: the first floor(k/2) ratings equal 2 (or -2). The prefix is
/// at least one rating so that k = 1 is not vacuous.
/// same_sign: the first ceil(k/2) ratings lie in {1, 2} (or {-1, -2}).
HalfTopClaim half_top_claim(HalfTop prop, std::size_t k, bool positive);

/// Sign the claim predicts for a concrete rating vector, or 0 when the
/// hypothesis does not apply.
int check_half_top_dominance(HalfTop prop, const std::vector<int>& ratings);

struct ExhaustiveResult {
  std::size_t cases = 0;
  std::size_t counterexamples = 0;
  std::vector<std::vector<int>> examples;  ///< up to the first few counterexamples
};

/// Enumerates every rating vector satisfying the hypothesis for length k and
/// counts those whose exact score sign differs from the claim. k <= 40.
ExhaustiveResult verify_half_top(HalfTop prop, std::size_t k, bool positive);

}  // namespace pilotmesh::qoe
