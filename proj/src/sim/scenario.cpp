#include "pilotmesh/sim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pilotmesh/qoe/experiment.hpp"

namespace pilotmesh::sim {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) { return qoe::trial_seed(seed, stream); }

double Rng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::uniform_int(std::uint64_t lo, std::uint64_t hi) {
  if (hi < lo) throw std::invalid_argument("Rng::uniform_int: empty range");
  const std::uint64_t span = hi - lo;
  if (span == ~std::uint64_t{0}) return engine_();
  const std::uint64_t n = span + 1;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
  std::uint64_t x = engine_();
  while (x > limit) x = engine_();
  return lo + x % n;
}

std::vector<std::uint64_t> Rng::sample(std::uint64_t n, std::uint64_t k) {
  if (k > n) throw std::invalid_argument("Rng::sample: k exceeds n");
  std::vector<std::uint64_t> pool(n);
  for (std::uint64_t i = 0; i < n; ++i) pool[i] = i;
  for (std::uint64_t i = 0; i < k; ++i) std::swap(pool[i], pool[uniform_int(i, n - 1)]);
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

Scenario scenario_from_topology(Topology topology, std::size_t pilots_to_open, double p_cap) {
  topology.validate();
  Scenario sc;
  sc.eligible = topology.eligible();
  for (const Device& d : topology.devices) sc.members.push_back(d.id);
  auto& inst = sc.instance;
  inst.pilots_to_open = pilots_to_open;
  inst.capacity = p_cap;
  for (DeviceId i : sc.members) inst.demands.push_back(static_cast<double>(topology.device(i).shared_mb));
  for (DeviceId j : sc.eligible) inst.pilot_data.push_back(static_cast<double>(topology.device(j).shared_mb));
  inst.dist.reserve(sc.members.size() * sc.eligible.size());
  for (DeviceId i : sc.members) {
    for (DeviceId j : sc.eligible) {
      inst.dist.push_back(distance(topology.device(i).position, topology.device(j).position));
    }
  }
  sc.topology = std::move(topology);
  sc.instance.validate();
  return sc;
}

Scenario generate_scenario(const SimConfig& cfg) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, kTopologyStream));
  Topology topo;
  topo.isd = cfg.isd;
  topo.d2d_range = cfg.d2d_range;
  topo.widths = cfg.widths;
  for (std::size_t i = 0; i < cfg.n_users; ++i) {
    const double r = cfg.isd * std::sqrt(rng.uniform01());
    const double theta = 2.0 * std::numbers::pi * rng.uniform01();
    Device d;
    d.id = static_cast<DeviceId>(i);
    d.position = {r * std::cos(theta), r * std::sin(theta)};
    d.shared_mb = rng.uniform_int(0, cfg.max_shared_mb);
    topo.devices.push_back(d);
  }
  for (std::uint64_t id : rng.sample(cfg.n_users, cfg.n_eligible)) topo.devices[id].pilot_eligible = true;
  return scenario_from_topology(std::move(topo), cfg.n_pilots, cfg.p_cap_mb);
}

Placement place_pilots(const Scenario& sc, Strategy strategy, std::uint64_t seed, const pmedian::SolverOptions& opts) {
  const auto& inst = sc.instance;
  inst.validate();
  pmedian::Assignment a(inst.members(), inst.eligible());
  Placement out;

  if (strategy == Strategy::pmedian) {
    out.report = pmedian::solve(inst, opts);
    a = out.report->assignment;
  } else {
    Rng rng(seed);
    for (std::uint64_t j : rng.sample(inst.eligible(), inst.pilots_to_open)) a.set_open(j, true);
    const auto open = a.open_pilots();
    for (std::size_t i = 0; i < inst.members(); ++i) {
      std::size_t best = open.front();
      for (std::size_t j : open) {
        if (inst.h(i, j) < inst.h(i, best)) best = j;
      }
      a.set_y(i, best, true);
    }
  }

  const auto open = a.open_pilots();
  for (std::size_t j : open) out.pilots.push_back(sc.eligible[j]);
  const auto rows = a.member_pilots();
  out.association.resize(inst.members());
  for (std::size_t i = 0; i < inst.members(); ++i) {
    if (rows[i] >= 0) out.association[i] = sc.eligible[static_cast<std::size_t>(rows[i])];
  }
  for (std::size_t j : open) out.loads.push_back(pmedian::pilot_load(inst, a, j, opts.capacity_model));
  out.max_load = out.loads.empty() ? 0.0 : *std::max_element(out.loads.begin(), out.loads.end());
  return out;
}

}  // namespace pilotmesh::sim
