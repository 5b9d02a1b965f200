#pragma once

#include <cstddef>

#include "pilotmesh/pmedian/instance.hpp"

namespace pilotmesh::pmedian {

inline constexpr std::size_t kOracleMaxEligible = 12;
inline constexpr std::size_t kOracleMaxMembers = 14;

struct OracleResult {
  bool feasible = false;  ///< false when no pilot set admits a capacity-respecting assignment
  double objective = 0.0;
  Assignment assignment;
  std::size_t subsets_examined = 0;
};

/// Exact optimum by enumerating every C(e, P) pilot set and, per set, the
/// cheapest capacity-respecting assignment (branch and bound). Ties keep the
/// lexicographically first pilot set. Throws std::invalid_argument beyond
/// e <= 12 or m <= 14.
OracleResult brute_force_oracle(const Instance& inst, CapacityModel model = CapacityModel::per_member);

}  // namespace pilotmesh::pmedian
