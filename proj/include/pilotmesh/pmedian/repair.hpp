#pragma once

#include <cstddef>
#include <vector>

#include "pilotmesh/pmedian/instance.hpp"

namespace pilotmesh::pmedian {

struct RepairOptions {
  /// Node budget of the exact packing search run when greedy and local moves
  /// leave a pilot over capacity. 0 disables the search.
  std::size_t search_budget = 200000;
};

struct RepairResult {
  Assignment assignment;
  std::size_t capacity_violations = 0;  ///< open pilots still over P_cap
  bool changed = false;                 ///< false when the input was already feasible
  std::vector<double> loads;            ///< per eligible pilot, 0 for closed ones
};

/// Turns a relaxed (Z, Y) into one open pilot per member.
///
/// Members are placed in ascending order of their cheapest d_i h_ij. Each
/// member first tries the open pilots it was relaxed onto, then the rest, both
/// cheapest first, and takes the first with residual capacity. When none has
/// room it goes to its cheapest open pilot and the overload is counted.
/// Overloads are then reduced by single moves and pairwise swaps, and finally
/// by a budgeted exact packing search.
///
/// Throws std::invalid_argument unless exactly P pilots are open.
RepairResult repair_feasibility(const Instance& inst, const Assignment& relaxed,
                                CapacityModel model = CapacityModel::per_member, const RepairOptions& opts = {});

}  // namespace pilotmesh::pmedian
