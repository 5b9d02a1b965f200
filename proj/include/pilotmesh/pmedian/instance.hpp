#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace pilotmesh::pmedian {

inline constexpr double kUncapacitated = std::numeric_limits<double>::infinity();

/// How a pilot's own shared data enters its capacity row.
enum class CapacityModel {
  /// (d_i + d_j) per assigned member, exactly as the formulation writes it.
  per_member,
  /// sum_i d_i Y_ij + d_j Z_j: the pilot's data counted once when it opens.
  pilot_data_once,
};

/// A capacitated P-median instance: m members, e eligible pilots.
struct Instance {
  std::vector<double> demands;     ///< d_i, MB per member
  std::vector<double> pilot_data;  ///< d_j, MB per eligible pilot
  std::vector<double> dist;        ///< h_ij in meters, row-major m x e
  std::size_t pilots_to_open = 1;  ///< P
  double capacity = kUncapacitated;  ///< P_cap in MB

  std::size_t members() const { return demands.size(); }
  std::size_t eligible() const { return pilot_data.size(); }
  double h(std::size_t i, std::size_t j) const { return dist[i * eligible() + j]; }
  double cost(std::size_t i, std::size_t j) const { return demands[i] * h(i, j); }
  bool capacitated() const { return capacity != kUncapacitated; }

  /// Capacity-row coefficient of Y_ij.
  double weight(std::size_t i, std::size_t j, CapacityModel model) const {
    return model == CapacityModel::per_member ? demands[i] + pilot_data[j] : demands[i];
  }
  /// Capacity-row coefficient of Z_j.
  double fixed_load(std::size_t j, CapacityModel model) const {
    return model == CapacityModel::pilot_data_once ? pilot_data[j] : 0.0;
  }

  /// Throws std::invalid_argument on negative or non-finite data, a
  /// mis-sized distance matrix, P outside [1, e] or a non-positive capacity.
  void validate() const;
};

/// Loads are sums of MB values; the slack absorbs rounding from decimal inputs.
inline bool exceeds_capacity(double load, double capacity) {
  return load > capacity + 1e-9 * (capacity > 1.0 ? capacity : 1.0);
}

/// Z_j and Y_ij. The relaxed subproblem may leave a member unassigned or on
/// several pilots; feasible assignments have exactly one open pilot per member.
class Assignment {
 public:
  Assignment() = default;
  Assignment(std::size_t members, std::size_t eligible)
      : members_(members), eligible_(eligible), open_(eligible, 0), assigned_(members * eligible, 0) {}

  std::size_t members() const { return members_; }
  std::size_t eligible() const { return eligible_; }

  bool is_open(std::size_t j) const { return open_[j] != 0; }
  void set_open(std::size_t j, bool v) { open_[j] = v ? 1 : 0; }
  bool y(std::size_t i, std::size_t j) const { return assigned_[i * eligible_ + j] != 0; }
  void set_y(std::size_t i, std::size_t j, bool v) { assigned_[i * eligible_ + j] = v ? 1 : 0; }

  /// Clears row i and assigns member i to pilot j only.
  void assign_only(std::size_t i, std::size_t j);

  std::vector<std::size_t> open_pilots() const;
  std::size_t open_count() const;
  std::size_t row_count(std::size_t i) const;
  /// Pilot index per member, or -1 when a row does not hold exactly one entry.
  std::vector<std::int64_t> member_pilots() const;

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::size_t members_ = 0;
  std::size_t eligible_ = 0;
  std::vector<std::uint8_t> open_;
  std::vector<std::uint8_t> assigned_;
};

/// sum_j sum_i d_i h_ij Y_ij. Throws std::invalid_argument on dimension mismatch.
double objective(const Instance& inst, const Assignment& a);

/// Load on pilot j under the chosen capacity model.
double pilot_load(const Instance& inst, const Assignment& a, std::size_t j, CapacityModel model);

struct AuditResult {
  bool pilot_count_ok = false;    ///< sum_j Z_j == P
  bool coverage_ok = false;       ///< every member on exactly one pilot
  bool assignment_open_ok = false;  ///< Y_ij = 1 implies Z_j = 1
  std::size_t capacity_violations = 0;  ///< open pilots over P_cap

  bool feasible() const { return pilot_count_ok && coverage_ok && assignment_open_ok && capacity_violations == 0; }
};

AuditResult audit(const Instance& inst, const Assignment& a, CapacityModel model);

}  // namespace pilotmesh::pmedian
