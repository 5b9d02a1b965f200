#include "pilotmesh/pmedian/oracle.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace pilotmesh::pmedian {

namespace {

struct SubsetSearch {
  const Instance& inst;
  CapacityModel model;
  const std::vector<std::size_t>& open;
  std::vector<std::size_t> order;
  std::vector<std::vector<std::size_t>> pref;
  std::vector<double> tail;
  std::vector<double> load;
  std::vector<std::size_t> cur;
  std::vector<std::size_t> best;
  double best_cost = std::numeric_limits<double>::infinity();

  SubsetSearch(const Instance& in, CapacityModel mo, const std::vector<std::size_t>& op)
      : inst(in), model(mo), open(op) {
    const std::size_t m = inst.members();
    order.resize(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return inst.demands[a] > inst.demands[b]; });
    pref.resize(m);
    std::vector<double> min_cost(m);
    for (std::size_t i = 0; i < m; ++i) {
      pref[i] = open;
      std::stable_sort(pref[i].begin(), pref[i].end(),
                       [&](std::size_t a, std::size_t b) { return inst.cost(i, a) < inst.cost(i, b); });
      min_cost[i] = inst.cost(i, pref[i].front());
    }
    tail.assign(m + 1, 0.0);
    for (std::size_t k = m; k-- > 0;) tail[k] = tail[k + 1] + min_cost[order[k]];
    load.assign(inst.eligible(), 0.0);
    for (std::size_t j : open) load[j] = inst.fixed_load(j, model);
    cur.assign(m, 0);
  }

  void run() {
    for (std::size_t j : open) {
      if (exceeds_capacity(load[j], inst.capacity)) return;
    }
    dfs(0, 0.0);
  }

  void dfs(std::size_t k, double cost) {
    if (cost + tail[k] >= best_cost) return;
    if (k == order.size()) {
      best = cur;
      best_cost = cost;
      return;
    }
    const std::size_t i = order[k];
    for (std::size_t j : pref[i]) {
      const double w = inst.weight(i, j, model);
      if (inst.capacitated() && exceeds_capacity(load[j] + w, inst.capacity)) continue;
      load[j] += w;
      cur[i] = j;
      dfs(k + 1, cost + inst.cost(i, j));
      load[j] -= w;
    }
  }
};

}  // namespace

OracleResult brute_force_oracle(const Instance& inst, CapacityModel model) {
  inst.validate();
  if (inst.eligible() > kOracleMaxEligible || inst.members() > kOracleMaxMembers) {
    throw std::invalid_argument(fmt::format("oracle: instance {}x{} exceeds the enumeration guard (m <= {}, e <= {})",
                                            inst.members(), inst.eligible(), kOracleMaxMembers, kOracleMaxEligible));
  }
  const std::size_t e = inst.eligible();
  const std::size_t P = inst.pilots_to_open;

  OracleResult out;
  out.assignment = Assignment(inst.members(), e);
  double best = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> subset(P);
  std::iota(subset.begin(), subset.end(), std::size_t{0});
  while (true) {
    ++out.subsets_examined;
    SubsetSearch s(inst, model, subset);
    s.run();
    if (!s.best.empty() && s.best_cost < best) {
      best = s.best_cost;
      out.assignment = Assignment(inst.members(), e);
      for (std::size_t j : subset) out.assignment.set_open(j, true);
      for (std::size_t i = 0; i < inst.members(); ++i) out.assignment.set_y(i, s.best[i], true);
    }
    // Next combination in lexicographic order.
    std::size_t pos = P;
    while (pos > 0 && subset[pos - 1] == e - P + pos - 1) --pos;
    if (pos == 0) break;
    ++subset[pos - 1];
    for (std::size_t q = pos; q < P; ++q) subset[q] = subset[q - 1] + 1;
  }
  out.feasible = best < std::numeric_limits<double>::infinity();
  out.objective = out.feasible ? best : 0.0;
  return out;
}

}  // namespace pilotmesh::pmedian
