#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "pilotmesh/pmedian/instance.hpp"
#include "pilotmesh/sim/scenario.hpp"

namespace pilotmesh::testing {

/// m = 3, e = 2: d = (10, 10, 10), column a = (1, 1, 5), column b = (5, 5, 1).
inline pmedian::Instance tiny_instance(std::size_t p = 1, double cap = pmedian::kUncapacitated) {
  pmedian::Instance inst;
  inst.demands = {10, 10, 10};
  inst.pilot_data = {10, 10};
  inst.dist = {1, 5, 1, 5, 5, 1};
  inst.pilots_to_open = p;
  inst.capacity = cap;
  return inst;
}

/// Points uniform in a 250 m disc, integer demands in [0, 500], Euclidean distances.
inline pmedian::Instance random_instance(std::uint64_t seed, std::size_t m, std::size_t e, std::size_t p,
                                         double cap = pmedian::kUncapacitated) {
  sim::Rng rng(seed);
  auto point = [&] {
    const double r = 250.0 * std::sqrt(rng.uniform01());
    const double th = 6.283185307179586 * rng.uniform01();
    return Position{r * std::cos(th), r * std::sin(th)};
  };
  std::vector<Position> members(m);
  std::vector<Position> pilots(e);
  pmedian::Instance inst;
  for (auto& x : members) {
    x = point();
    inst.demands.push_back(static_cast<double>(rng.uniform_int(0, 500)));
  }
  for (auto& x : pilots) {
    x = point();
    inst.pilot_data.push_back(static_cast<double>(rng.uniform_int(0, 500)));
  }
  for (const auto& a : members) {
    for (const auto& b : pilots) inst.dist.push_back(distance(a, b));
  }
  inst.pilots_to_open = p;
  inst.capacity = cap;
  return inst;
}

inline bool close(double a, double b, double rel = 1e-9) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace pilotmesh::testing
