#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "pilotmesh/overlay/overlay.hpp"
#include "pilotmesh/sim/config.hpp"

namespace pilotmesh::sim {

inline constexpr std::size_t kParamCount = 9;
using ParamArray = std::array<double, kParamCount>;

/// Everything measured about one user's lookup in one iteration.
struct LookupMeasurement {
  overlay::LookupResult result;
  bool self_held = false;
  int target_d2d_hops = 0;   ///< D2D hops on the data path; 0 when the data did not travel over D2D
  int pilot_hops = 0;        ///< D2D hops to the associated pilot; 0 when unattached or a pilot
  bool attached = false;
  bool is_pilot = false;
  double keyword_pct = 0.0;  ///< share of the keyword's files indexed in the vicinity
};

double energy_units(const overlay::LinkCounts& links, const MeasurePolicy& policy);

/// Percentages of the nine QoE parameters for one lookup:
///  1 internet-free access: found with no cellular link
///  2 chunk access time: 100 (1 - hops / max_hops)
///  3 energy: 100 (1 - weighted link units / max_units)
///  4 rank search: found without leaving the vicinity
///  5 keyword search: keyword_pct
///  6 target hop distance: 100 / D2D hops on the data path
///  7 connect time: 100 / request edges before the transfer starts
///  8 pilot hop distance: 100 / D2D hops to the pilot
///  9 join time: 100 / registration steps
ParamArray measure_parameters(const LookupMeasurement& m, const MeasurePolicy& policy);

/// Mean percentage per parameter over a non-empty ledger.
ParamArray parameter_percentages(const std::vector<LookupMeasurement>& ledger, const MeasurePolicy& policy);

/// Rates the first n_params percentages and scores them with us_overall.
double user_score(const ParamArray& pct, std::size_t n_params, const qoe::RatingPolicy& policy);

struct IterationMetrics {
  std::size_t iteration = 0;
  double mean_us = 0.0;
  ParamArray param_pct{};
  std::array<std::size_t, 4> cases{};
  std::size_t not_found = 0;
  overlay::LinkCounts links;
  std::vector<double> pilot_loads;
  double max_pilot_load = 0.0;
  std::size_t lookups = 0;
};

struct RunMetrics {
  std::uint64_t seed = 0;
  Mode mode = Mode::dht_d2d;
  std::vector<DeviceId> pilots;
  std::vector<IterationMetrics> iterations;

  double mean_us() const;
};

/// One JSON-lines record per lookup.
struct LookupEvent {
  std::size_t iteration = 0;
  DeviceId requester = 0;
  std::uint64_t key = 0;
  overlay::LookupCase case_used = overlay::LookupCase::case0;
  int hops = 0;
  overlay::LinkCounts links;
  bool found = false;
};

std::string csv_header();
/// One row per iteration, numbers at 4 decimal places.
void write_csv_rows(std::ostream& os, const RunMetrics& run);
std::string event_json_line(const LookupEvent& e);

}  // namespace pilotmesh::sim
