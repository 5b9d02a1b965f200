#include "pilotmesh/qoe/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "pilotmesh/qoe/qoe.hpp"

namespace pilotmesh::qoe {

namespace {

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

int draw_rating(std::mt19937_64& rng, const RatingDistribution& cdf) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    if (u < cdf[i]) return static_cast<int>(i) - 2;
  }
  return 2;
}

}  // namespace

double ExperimentResult::fraction_below(double bound) const {
  if (samples.empty()) return 0.0;
  const auto n = std::count_if(samples.begin(), samples.end(), [&](double s) { return std::abs(s) < bound; });
  return static_cast<double>(n) / static_cast<double>(samples.size());
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ExperimentResult random_harmonic_experiment(std::size_t k, std::size_t trials, std::uint64_t seed,
                                            const RatingDistribution& dist, unsigned threads) {
  if (k < 1) throw std::invalid_argument("experiment: k must be at least 1");
  double total = 0.0;
  for (double p : dist) {
    if (!(p >= 0.0)) throw std::invalid_argument("experiment: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("experiment: probabilities must sum to 1");
  RatingDistribution cdf{};
  std::partial_sum(dist.begin(), dist.end(), cdf.begin());
  cdf.back() = 1.0;
  // A zero-probability top level must never be drawn.
  for (std::size_t i = cdf.size(); i-- > 1;) {
    if (dist[i] == 0.0) cdf[i - 1] = std::max(cdf[i - 1], cdf[i]);
  }

  ExperimentResult out;
  out.samples.assign(trials, 0.0);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, trials)));

  auto worker = [&](unsigned w) {
    std::vector<int> ratings(k);
    for (std::size_t t = w; t < trials; t += threads) {
      std::mt19937_64 rng(trial_seed(seed, t));
      for (auto& r : ratings) r = draw_rating(rng, cdf);
      out.samples[t] = us_overall(ratings);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < threads; ++w) pool.emplace_back(worker, w);
  worker(0);
  for (auto& th : pool) th.join();

  if (trials == 0) return out;
  out.mean = std::accumulate(out.samples.begin(), out.samples.end(), 0.0) / static_cast<double>(trials);
  if (trials > 1) {
    double ss = 0.0;
    for (double s : out.samples) ss += (s - out.mean) * (s - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(trials - 1));
  }
  std::vector<double> abs_sorted(trials);
  std::transform(out.samples.begin(), out.samples.end(), abs_sorted.begin(), [](double s) { return std::abs(s); });
  std::sort(abs_sorted.begin(), abs_sorted.end());
  out.abs_q50 = quantile(abs_sorted, 0.5);
  out.abs_q90 = quantile(abs_sorted, 0.9);
  out.abs_q99 = quantile(abs_sorted, 0.99);
  out.abs_max = abs_sorted.back();
  return out;
}

}  // namespace pilotmesh::qoe
