#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pilotmesh/pmedian/solver.hpp"
#include "pilotmesh/sim/config.hpp"
#include "pilotmesh/sim/metrics.hpp"
#include "pilotmesh/sim/scenario.hpp"

namespace pilotmesh::sim {

using EventSink = std::function<void(const LookupEvent&)>;

/// FileKey for the index-th injected file of a run, skipping keys in `taken`.
FileKey file_key(std::uint64_t seed, std::uint64_t index, unsigned m, const std::function<bool(FileKey)>& taken);

/// One run of the experiment loop. Each iteration injects files_per_iter new
/// files at random holders, then every user issues one lookup. The key is a
/// file injected this iteration with probability new_file_fraction, otherwise
/// one already searched by the user's vicinity group (falling back to a new
/// file while that pool is empty). Vicinity groups come from the pilot
/// placement, which both modes share, and the workload has its own random
/// stream, so d2d_only and dht_d2d runs with one seed see the same requests.
RunMetrics run(const SimConfig& cfg, const EventSink& sink = {});
/// Same loop on a given scenario; only the workload and WiFi draws use cfg.seed.
RunMetrics run(const SimConfig& cfg, const Scenario& sc, const EventSink& sink = {});

/// run() for the same config under both modes.
struct PairedRun {
  RunMetrics d2d_only;
  RunMetrics dht_d2d;
};
PairedRun run_paired(SimConfig cfg, const EventSink& sink = {});
PairedRun run_paired(SimConfig cfg, const Scenario& sc, const EventSink& sink = {});

/// Independent runs for seeds [first, last], computed on `threads` workers
/// (0 = hardware) and returned in seed order. With `fixed` every run shares that scenario.
std::vector<RunMetrics> run_seeds(const SimConfig& cfg, std::uint64_t first, std::uint64_t last, unsigned threads = 0,
                                  const Scenario* fixed = nullptr);

}  // namespace pilotmesh::sim
