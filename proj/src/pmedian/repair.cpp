#include "pilotmesh/pmedian/repair.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace pilotmesh::pmedian {

namespace {

struct Packer {
  const Instance& inst;
  CapacityModel model;
  std::vector<std::size_t> open;
  std::vector<int> assign;  // open-pilot slot per member
  std::vector<double> load;  // per open slot

  double w(std::size_t i, std::size_t s) const { return inst.weight(i, open[s], model); }
  double c(std::size_t i, std::size_t s) const { return inst.cost(i, open[s]); }
  double cap() const { return inst.capacity; }

  double overload() const {
    double over = 0.0;
    for (double l : load) over += std::max(0.0, l - cap());
    return over;
  }

  std::size_t violations() const {
    std::size_t n = 0;
    for (double l : load) n += exceeds_capacity(l, cap()) ? 1 : 0;
    return n;
  }

  std::vector<std::size_t> slots_by_cost(std::size_t i) const {
    std::vector<std::size_t> s(open.size());
    std::iota(s.begin(), s.end(), std::size_t{0});
    std::stable_sort(s.begin(), s.end(), [&](std::size_t a, std::size_t b) { return c(i, a) < c(i, b); });
    return s;
  }

  void move(std::size_t i, std::size_t to) {
    const auto from = static_cast<std::size_t>(assign[i]);
    load[from] -= w(i, from);
    load[to] += w(i, to);
    assign[i] = static_cast<int>(to);
  }

  bool improve_by_move() {
    const double cur = overload();
    for (std::size_t i = 0; i < assign.size(); ++i) {
      const auto a = static_cast<std::size_t>(assign[i]);
      for (std::size_t b = 0; b < open.size(); ++b) {
        if (b == a) continue;
        move(i, b);
        if (overload() < cur - 1e-12) return true;
        move(i, a);
      }
    }
    return false;
  }

  bool improve_by_swap() {
    const double cur = overload();
    for (std::size_t i = 0; i < assign.size(); ++i) {
      for (std::size_t k = i + 1; k < assign.size(); ++k) {
        const auto a = static_cast<std::size_t>(assign[i]);
        const auto b = static_cast<std::size_t>(assign[k]);
        if (a == b) continue;
        move(i, b);
        move(k, a);
        if (overload() < cur - 1e-12) return true;
        move(k, b);
        move(i, a);
      }
    }
    return false;
  }

  // Exact search over capacity-respecting packings, cheapest first, heaviest
  // members placed first.
  bool exact_search(std::size_t budget) {
    const std::size_t m = assign.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return inst.demands[a] > inst.demands[b]; });
    std::vector<std::vector<std::size_t>> pref(m);
    std::vector<double> min_cost(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      pref[i] = slots_by_cost(i);
      min_cost[i] = c(i, pref[i].front());
    }
    std::vector<double> tail(m + 1, 0.0);
    for (std::size_t k = m; k-- > 0;) tail[k] = tail[k + 1] + min_cost[order[k]];

    std::vector<double> l(open.size(), 0.0);
    std::vector<int> cur(m, -1);
    std::vector<int> best;
    double best_cost = std::numeric_limits<double>::infinity();
    std::size_t nodes = 0;

    auto dfs = [&](auto&& self, std::size_t k, double cost) -> void {
      if (++nodes > budget || cost + tail[k] >= best_cost) return;
      if (k == m) {
        best = cur;
        best_cost = cost;
        return;
      }
      const std::size_t i = order[k];
      for (std::size_t s : pref[i]) {
        if (exceeds_capacity(l[s] + w(i, s), cap())) continue;
        l[s] += w(i, s);
        cur[i] = static_cast<int>(s);
        self(self, k + 1, cost + c(i, s));
        l[s] -= w(i, s);
      }
      cur[i] = -1;
    };
    dfs(dfs, 0, 0.0);
    if (best.empty()) return false;
    assign = best;
    std::fill(load.begin(), load.end(), 0.0);
    for (std::size_t s = 0; s < open.size(); ++s) load[s] = inst.fixed_load(open[s], model);
    for (std::size_t i = 0; i < m; ++i) load[static_cast<std::size_t>(assign[i])] += w(i, static_cast<std::size_t>(assign[i]));
    return true;
  }
};

}  // namespace

RepairResult repair_feasibility(const Instance& inst, const Assignment& relaxed, CapacityModel model,
                                const RepairOptions& opts) {
  if (relaxed.members() != inst.members() || relaxed.eligible() != inst.eligible()) {
    throw std::invalid_argument("repair_feasibility: assignment dimensions do not match the instance");
  }
  if (relaxed.open_count() != inst.pilots_to_open) {
    throw std::invalid_argument(
        fmt::format("repair_feasibility: {} pilots open, expected {}", relaxed.open_count(), inst.pilots_to_open));
  }

  RepairResult out;
  if (audit(inst, relaxed, model).feasible()) {
    out.assignment = relaxed;
    out.loads.resize(inst.eligible());
    for (std::size_t j = 0; j < inst.eligible(); ++j) out.loads[j] = pilot_load(inst, relaxed, j, model);
    return out;
  }

  Packer pk{inst, model, relaxed.open_pilots(), std::vector<int>(inst.members(), -1), {}};
  pk.load.resize(pk.open.size());
  for (std::size_t s = 0; s < pk.open.size(); ++s) pk.load[s] = inst.fixed_load(pk.open[s], model);

  std::vector<std::vector<std::size_t>> prefs(inst.members());
  std::vector<double> key(inst.members());
  for (std::size_t i = 0; i < inst.members(); ++i) {
    const auto by_cost = pk.slots_by_cost(i);
    std::vector<std::size_t> first;
    std::vector<std::size_t> rest;
    for (std::size_t s : by_cost) (relaxed.y(i, pk.open[s]) ? first : rest).push_back(s);
    first.insert(first.end(), rest.begin(), rest.end());
    prefs[i] = std::move(first);
    key[i] = pk.c(i, by_cost.front());
  }
  std::vector<std::size_t> order(inst.members());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });

  for (std::size_t i : order) {
    std::size_t chosen = pk.slots_by_cost(i).front();
    for (std::size_t s : prefs[i]) {
      if (!exceeds_capacity(pk.load[s] + pk.w(i, s), pk.cap())) {
        chosen = s;
        break;
      }
    }
    pk.assign[i] = static_cast<int>(chosen);
    pk.load[chosen] += pk.w(i, chosen);
  }

  if (inst.capacitated() && pk.violations() > 0) {
    while (pk.violations() > 0 && (pk.improve_by_move() || pk.improve_by_swap())) {
    }
    if (pk.violations() > 0 && opts.search_budget > 0) pk.exact_search(opts.search_budget);
  }

  out.assignment = Assignment(inst.members(), inst.eligible());
  for (std::size_t j : pk.open) out.assignment.set_open(j, true);
  for (std::size_t i = 0; i < inst.members(); ++i) {
    out.assignment.set_y(i, pk.open[static_cast<std::size_t>(pk.assign[i])], true);
  }
  out.loads.assign(inst.eligible(), 0.0);
  for (std::size_t s = 0; s < pk.open.size(); ++s) out.loads[pk.open[s]] = pk.load[s];
  out.capacity_violations = inst.capacitated() ? pk.violations() : 0;
  out.changed = !(out.assignment == relaxed);
  return out;
}

}  // namespace pilotmesh::pmedian
