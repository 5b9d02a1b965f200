#include "pilotmesh/sim/run.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "pilotmesh/overlay/overlay.hpp"

namespace pilotmesh::sim {

FileKey file_key(std::uint64_t seed, std::uint64_t index, unsigned m, const std::function<bool(FileKey)>& taken) {
  FileKey k = key_from_content(fmt::format("file-{}-{}", seed, index), m);
  for (unsigned attempt = 1; taken && taken(k); ++attempt) {
    k = key_from_content(fmt::format("file-{}-{}-{}", seed, index, attempt), m);
  }
  return k;
}

namespace {

class Catalog {
 public:
  explicit Catalog(std::uint64_t keyword_count) : keyword_count_(keyword_count) {}

  bool contains(FileKey k) const { return keys_.count(k) != 0; }
  void add(FileKey k) {
    if (keys_.insert(k).second) ++per_keyword_[keyword(k)];
  }
  std::uint64_t keyword(FileKey k) const { return k.value % keyword_count_; }
  std::size_t keyword_total(std::uint64_t kw) const {
    auto it = per_keyword_.find(kw);
    return it == per_keyword_.end() ? 0 : it->second;
  }

 private:
  std::uint64_t keyword_count_;
  std::set<FileKey> keys_;
  std::map<std::uint64_t, std::size_t> per_keyword_;
};

double keyword_share(const overlay::Overlay& ov, DeviceId requester, FileKey key, const Catalog& catalog) {
  const std::uint64_t kw = catalog.keyword(key);
  const std::size_t total = catalog.keyword_total(kw);
  if (total == 0) return 0.0;
  std::size_t local = 0;
  if (const auto p = ov.pilot_of(requester)) {
    const auto& t = ov.table(*p);
    for (const auto& [k, holders] : t.stored_keys) {
      if (!holders.empty() && catalog.keyword(k) == kw) ++local;
    }
  } else {
    for (const FileKey& k : ov.keys_of(requester)) {
      if (catalog.keyword(k) == kw) ++local;
    }
  }
  return 100.0 * static_cast<double>(local) / static_cast<double>(total);
}

int data_path_hops(const overlay::Overlay& ov, DeviceId requester, const overlay::LookupResult& r) {
  using overlay::LookupCase;
  if (!r.found || !r.holder || r.case_used == LookupCase::case3) return 0;
  const auto& topo = ov.topology();
  const double range = topo.d2d_range;
  auto hops = [&](DeviceId a, DeviceId b) {
    return a == b ? 0 : d2d_hops(distance(topo.device(a).position, topo.device(b).position), range);
  };
  const DeviceId h = *r.holder;
  if (r.case_used == LookupCase::case2) {
    return std::max(1, hops(h, *r.holder_pilot) + hops(*r.requester_pilot, requester));
  }
  return std::max(1, hops(h, requester));
}

}  // namespace

RunMetrics run(const SimConfig& cfg, const EventSink& sink) { return run(cfg, generate_scenario(cfg), sink); }

RunMetrics run(const SimConfig& cfg, const Scenario& sc, const EventSink& sink) {
  cfg.validate();
  if (sc.topology.devices.size() != cfg.n_users) throw std::invalid_argument("run: scenario size differs from n_users");
  pmedian::SolverOptions sopts;
  sopts.capacity_model = cfg.capacity_model;
  const Placement placement = place_pilots(sc, cfg.strategy, derive_seed(cfg.seed, kPlacementStream), sopts);

  Topology topo = sc.topology;
  if (cfg.mode == Mode::dht_d2d) {
    topo.set_pilots(placement.pilots);
    Rng wifi_rng(derive_seed(cfg.seed, kWifiStream));
    const auto n_wifi = static_cast<std::uint64_t>(
        std::llround(cfg.wifi_pilot_fraction * static_cast<double>(placement.pilots.size())));
    for (DeviceId p : placement.pilots) topo.devices[p].wifi_connected = false;
    for (std::uint64_t idx : wifi_rng.sample(placement.pilots.size(), n_wifi)) {
      topo.devices[placement.pilots[idx]].wifi_connected = true;
    }
  }
  overlay::Overlay ov(std::move(topo));

  // Vicinity group of each device: its pilot under the placement.
  std::vector<DeviceId> group(cfg.n_users);
  for (std::size_t i = 0; i < cfg.n_users; ++i) {
    group[i] = placement.association[i].value_or(static_cast<DeviceId>(i));
  }
  for (DeviceId p : placement.pilots) group[p] = p;

  for (std::size_t i = 0; i < cfg.n_users; ++i) {
    const auto d = static_cast<DeviceId>(i);
    const auto reg = ov.register_device(d);
    if (cfg.mode == Mode::dht_d2d && placement.association[i] && reg.pilot != placement.association[i] &&
        !std::binary_search(placement.pilots.begin(), placement.pilots.end(), d)) {
      ov.attach(d, *placement.association[i]);
    }
  }

  RunMetrics out;
  out.seed = cfg.seed;
  out.mode = cfg.mode;
  out.pilots = placement.pilots;

  Rng rng(derive_seed(cfg.seed, kWorkloadStream));
  Catalog catalog(cfg.measure.keyword_count);
  const unsigned m = cfg.widths.total();
  std::uint64_t file_index = 0;
  auto inject = [&](std::size_t count) {
    std::vector<FileKey> fresh;
    fresh.reserve(count);
    for (std::size_t f = 0; f < count; ++f) {
      const FileKey k = file_key(cfg.seed, file_index++, m, [&](FileKey c) { return catalog.contains(c); });
      const auto holder = static_cast<DeviceId>(rng.uniform_int(0, cfg.n_users - 1));
      ov.store(holder, k);
      catalog.add(k);
      fresh.push_back(k);
    }
    return fresh;
  };
  inject(cfg.initial_files);

  std::map<DeviceId, std::vector<FileKey>> searched;
  std::map<DeviceId, std::set<FileKey>> searched_set;

  for (std::size_t iter = 1; iter <= cfg.iterations; ++iter) {
    const std::vector<FileKey> fresh = inject(cfg.files_per_iter);
    IterationMetrics im;
    im.iteration = iter;
    im.pilot_loads = placement.loads;
    im.max_pilot_load = placement.max_load;
    std::vector<LookupMeasurement> ledger;
    ledger.reserve(cfg.n_users);
    double us_sum = 0.0;

    for (std::size_t u = 0; u < cfg.n_users; ++u) {
      const auto d = static_cast<DeviceId>(u);
      const double draw = rng.uniform01();
      const auto& pool = searched[group[u]];
      FileKey key;
      if (draw < cfg.new_file_fraction || pool.empty()) {
        key = fresh.empty() ? FileKey{} : fresh[rng.uniform_int(0, fresh.size() - 1)];
      } else {
        key = pool[rng.uniform_int(0, pool.size() - 1)];
      }

      LookupMeasurement lm;
      lm.keyword_pct = keyword_share(ov, d, key, catalog);
      lm.self_held = ov.holds(d, key);
      lm.result = ov.lookup(d, key);
      const auto p = ov.pilot_of(d);
      lm.attached = p.has_value();
      lm.is_pilot = p && *p == d;
      lm.pilot_hops = lm.attached && !lm.is_pilot ? ov.hops_to_pilot(d) : 0;
      lm.target_d2d_hops = data_path_hops(ov, d, lm.result);
      ov.cache_update(d, lm.result, key);
      if (searched_set[group[u]].insert(key).second) searched[group[u]].push_back(key);

      const ParamArray pct = measure_parameters(lm, cfg.measure);
      us_sum += user_score(pct, cfg.n_params, cfg.measure.rating);
      ++im.cases[static_cast<std::size_t>(lm.result.case_used)];
      if (!lm.result.found) ++im.not_found;
      im.links.bluetooth_d2d += lm.result.links.bluetooth_d2d;
      im.links.wifi += lm.result.links.wifi;
      im.links.cellular += lm.result.links.cellular;
      if (sink) {
        sink(LookupEvent{iter, d, key.value, lm.result.case_used, lm.result.hops, lm.result.links, lm.result.found});
      }
      ledger.push_back(std::move(lm));
    }
    im.lookups = ledger.size();
    im.mean_us = us_sum / static_cast<double>(cfg.n_users);
    im.param_pct = parameter_percentages(ledger, cfg.measure);
    out.iterations.push_back(std::move(im));
  }
  spdlog::debug("run: seed={} mode={} strategy={} mean_us={:.4f}", cfg.seed, to_string(cfg.mode),
                to_string(cfg.strategy), out.mean_us());
  return out;
}

PairedRun run_paired(SimConfig cfg, const EventSink& sink) {
  const Scenario sc = generate_scenario(cfg);
  return run_paired(std::move(cfg), sc, sink);
}

PairedRun run_paired(SimConfig cfg, const Scenario& sc, const EventSink& sink) {
  PairedRun r;
  cfg.mode = Mode::d2d_only;
  r.d2d_only = run(cfg, sc, sink);
  cfg.mode = Mode::dht_d2d;
  r.dht_d2d = run(cfg, sc, sink);
  return r;
}

std::vector<RunMetrics> run_seeds(const SimConfig& cfg, std::uint64_t first, std::uint64_t last, unsigned threads,
                                  const Scenario* fixed) {
  if (last < first) throw std::invalid_argument("run_seeds: empty seed range");
  const std::uint64_t n = last - first + 1;
  std::vector<RunMetrics> out(n);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, n));
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (std::uint64_t i = next++; i < n; i = next++) {
      try {
        SimConfig c = cfg;
        c.seed = first + i;
        out[i] = fixed ? run(c, *fixed) : run(c);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < threads; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace pilotmesh::sim
