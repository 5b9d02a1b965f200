#include "pilotmesh/qoe/qoe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace pilotmesh::qoe {

namespace {

// Neumaier summation.
struct CompensatedSum {
  double sum = 0.0;
  double c = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      c += (sum - t) + x;
    } else {
      c += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + c; }
};

// Exact integer form of the harmonic weights for short reports: with
// L = lcm(1..k), score = (sum US_i * L/i) / (sum L/i).
constexpr std::size_t kExactLimit = 40;

struct ExactScore {
  std::int64_t num = 0;
  std::int64_t den = 0;
};

ExactScore exact_score(const std::vector<int>& ratings) {
  std::int64_t l = 1;
  for (std::size_t i = 2; i <= ratings.size(); ++i) l = std::lcm(l, static_cast<std::int64_t>(i));
  ExactScore s;
  for (std::size_t i = 1; i <= ratings.size(); ++i) {
    const std::int64_t w = l / static_cast<std::int64_t>(i);
    s.num += ratings[i - 1] * w;
    s.den += w;
  }
  return s;
}

}  // namespace

Rating::Rating(int v) : value_(v) {
  if (v < -2 || v > 2) throw std::out_of_range(fmt::format("rating {} outside [-2, 2]", v));
}

SatisfactionReport SatisfactionReport::from_ratings(const std::vector<int>& ratings) {
  SatisfactionReport r;
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    const std::string name = i < kParameterCatalog.size() ? std::string(kParameterCatalog[i]) : fmt::format("param_{}", i + 1);
    r.params.push_back({name, Rating(ratings[i])});
  }
  return r;
}

double harmonic_number(std::size_t k) {
  CompensatedSum s;
  for (std::size_t i = k; i >= 1; --i) s.add(1.0 / static_cast<double>(i));
  return s.value();
}

double us_overall(const std::vector<int>& ratings) {
  if (ratings.empty()) throw std::invalid_argument("us_overall: empty report");
  for (int v : ratings) static_cast<void>(Rating(v));
  if (ratings.size() <= kExactLimit) {
    const ExactScore e = exact_score(ratings);
    return static_cast<double>(e.num) / static_cast<double>(e.den);
  }
  CompensatedSum num;
  CompensatedSum den;
  for (std::size_t i = ratings.size(); i >= 1; --i) {
    const int v = ratings[i - 1];
    const double w = 1.0 / static_cast<double>(i);
    num.add(v * w);
    den.add(w);
  }
  const double r = num.value() / den.value();
  return std::clamp(r, -2.0, 2.0);
}

double us_overall(const SatisfactionReport& report) {
  std::vector<int> v;
  v.reserve(report.params.size());
  for (const auto& p : report.params) v.push_back(p.rating.value());
  return us_overall(v);
}

void RatingPolicy::validate() const {
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (!(bounds[i] >= 0.0 && bounds[i] <= 100.0)) throw std::invalid_argument("rating policy: bound outside [0, 100]");
    if (i > 0 && !(bounds[i] > bounds[i - 1])) throw std::invalid_argument("rating policy: bounds must increase");
  }
}

Rating rate_percentage(double pct, const RatingPolicy& policy) {
  if (std::isnan(pct) || pct < 0.0 || pct > 100.0) {
    throw std::invalid_argument(fmt::format("rate_percentage: {} outside [0, 100]", pct));
  }
  if (pct < policy.bounds[0]) return Rating(-2);
  int level = -1;
  for (std::size_t i = 1; i < policy.bounds.size(); ++i) {
    if (pct > policy.bounds[i]) level = static_cast<int>(i) - 1;
  }
  return Rating(level);
}

HalfTopClaim half_top_claim(HalfTop prop, std::size_t k, bool positive) {
  if (k < 1) throw std::invalid_argument("half_top_claim: k must be at least 1");
  HalfTopClaim c;
  c.sign = positive ? 1 : -1;
  if (prop == HalfTop::extreme) {
    c.prefix_length = std::max<std::size_t>(1, k / 2);
    c.prefix_levels = {positive ? 2 : -2};
  } else {
    c.prefix_length = (k + 1) / 2;
    c.prefix_levels = positive ? std::vector<int>{1, 2} : std::vector<int>{-2, -1};
  }
  return c;
}

int check_half_top_dominance(HalfTop prop, const std::vector<int>& ratings) {
  if (ratings.empty()) return 0;
  for (bool positive : {true, false}) {
    const HalfTopClaim c = half_top_claim(prop, ratings.size(), positive);
    bool holds = true;
    for (std::size_t i = 0; i < c.prefix_length && holds; ++i) {
      holds = std::find(c.prefix_levels.begin(), c.prefix_levels.end(), ratings[i]) != c.prefix_levels.end();
    }
    if (holds) return c.sign;
  }
  return 0;
}

ExhaustiveResult verify_half_top(HalfTop prop, std::size_t k, bool positive) {
  if (k > kExactLimit) throw std::invalid_argument("verify_half_top: k above 40");
  const HalfTopClaim c = half_top_claim(prop, k, positive);
  const std::vector<int> all{-2, -1, 0, 1, 2};
  std::vector<const std::vector<int>*> domain(k, &all);
  for (std::size_t i = 0; i < c.prefix_length; ++i) domain[i] = &c.prefix_levels;

  ExhaustiveResult out;
  std::vector<std::size_t> idx(k, 0);
  std::vector<int> ratings(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) ratings[i] = (*domain[i])[idx[i]];
    ++out.cases;
    const std::int64_t n = exact_score(ratings).num;
    const bool ok = c.sign > 0 ? n > 0 : n < 0;
    if (!ok) {
      ++out.counterexamples;
      if (out.examples.size() < 8) out.examples.push_back(ratings);
    }
    std::size_t pos = k;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < domain[pos]->size()) break;
      idx[pos] = 0;
      if (pos == 0) return out;
    }
  }
}

}  // namespace pilotmesh::qoe
