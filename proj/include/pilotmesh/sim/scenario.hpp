#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "pilotmesh/core/topology.hpp"
#include "pilotmesh/pmedian/instance.hpp"
#include "pilotmesh/pmedian/solver.hpp"
#include "pilotmesh/sim/config.hpp"

namespace pilotmesh::sim {

/// Independent stream seed for a named purpose (splitmix64 of seed and stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

inline constexpr std::uint64_t kTopologyStream = 1;
inline constexpr std::uint64_t kPlacementStream = 2;
inline constexpr std::uint64_t kWifiStream = 3;
inline constexpr std::uint64_t kWorkloadStream = 4;

/// mt19937_64 with distribution code that does not depend on the standard
/// library implementation, so outputs match across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform01();
  /// Uniform integer in [lo, hi].
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);
  /// k distinct values from [0, n), ascending.
  std::vector<std::uint64_t> sample(std::uint64_t n, std::uint64_t k);

 private:
  std::mt19937_64 engine_;
};

/// A topology plus its P-median instance. Row i of the instance is device
/// members[i]; column j is device eligible[j].
struct Scenario {
  Topology topology;
  pmedian::Instance instance;
  std::vector<DeviceId> members;
  std::vector<DeviceId> eligible;
};

/// Uniform positions in the ISD disc, shared data uniform in [0, max_shared_mb],
/// n_eligible devices drawn as pilot candidates. Every device is a member.
Scenario generate_scenario(const SimConfig& cfg);

/// Builds the instance of a topology: all devices as members, eligible devices
/// as candidate pilots, Euclidean distances.
Scenario scenario_from_topology(Topology topology, std::size_t pilots_to_open, double p_cap);

struct Placement {
  std::vector<DeviceId> pilots;                  ///< ascending
  std::vector<std::optional<DeviceId>> association;  ///< per instance row
  std::vector<double> loads;                     ///< per pilot, in `pilots` order
  double max_load = 0.0;
  std::optional<pmedian::SolveReport> report;
};

/// random: P pilots drawn uniformly from the eligible set, members on their
/// nearest pilot. pmedian: the solver's open set and assignment. Loads follow
/// the capacity row of `model`. Propagates pmedian::InfeasibleInstance.
Placement place_pilots(const Scenario& sc, Strategy strategy, std::uint64_t seed,
                       const pmedian::SolverOptions& opts = {});

}  // namespace pilotmesh::sim
