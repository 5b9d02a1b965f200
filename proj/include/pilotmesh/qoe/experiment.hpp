#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace pilotmesh::qoe {

/// Probabilities of the ratings -2, -1, 0, 1, 2.
using RatingDistribution = std::array<double, 5>;

inline constexpr RatingDistribution kUniformRatings{0.2, 0.2, 0.2, 0.2, 0.2};

struct ExperimentResult {
  std::vector<double> samples;  ///< us_overall per trial, in trial order
  double mean = 0.0;
  double stddev = 0.0;  ///< sample standard deviation
  double abs_q50 = 0.0;  ///< quantiles of |us_overall|
  double abs_q90 = 0.0;
  double abs_q99 = 0.0;
  double abs_max = 0.0;

  /// Fraction of trials with |us_overall| strictly below `bound`.
  double fraction_below(double bound) const;
};

/// Seed of trial `t`, derived with splitmix64 so trials are independent of
/// how they are scheduled across threads.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

/// Draws k i.i.d. ratings per trial and scores them with us_overall.
/// Deterministic for a given seed whatever the thread count (0 = hardware).
ExperimentResult random_harmonic_experiment(std::size_t k, std::size_t trials, std::uint64_t seed,
                                            const RatingDistribution& dist = kUniformRatings,
                                            unsigned threads = 0);

}  // namespace pilotmesh::qoe
