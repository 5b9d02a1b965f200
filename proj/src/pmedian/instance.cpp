#include "pilotmesh/pmedian/instance.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace pilotmesh::pmedian {

namespace {
bool non_negative_finite(double v) { return std::isfinite(v) && v >= 0.0; }

void check_dims(const Instance& inst, const Assignment& a) {
  if (a.members() != inst.members() || a.eligible() != inst.eligible()) {
    throw std::invalid_argument(fmt::format("assignment is {}x{} but instance is {}x{}", a.members(), a.eligible(),
                                            inst.members(), inst.eligible()));
  }
}
}  // namespace

void Instance::validate() const {
  if (members() == 0) throw std::invalid_argument("instance: no members");
  if (eligible() == 0) throw std::invalid_argument("instance: no eligible pilots");
  if (dist.size() != members() * eligible()) {
    throw std::invalid_argument(
        fmt::format("instance: dist has {} entries, expected {}x{}", dist.size(), members(), eligible()));
  }
  for (std::size_t i = 0; i < demands.size(); ++i) {
    if (!non_negative_finite(demands[i])) throw std::invalid_argument(fmt::format("instance: demand {} invalid", i));
  }
  for (std::size_t j = 0; j < pilot_data.size(); ++j) {
    if (!non_negative_finite(pilot_data[j])) {
      throw std::invalid_argument(fmt::format("instance: pilot_data {} invalid", j));
    }
  }
  for (double h : dist) {
    if (!non_negative_finite(h)) throw std::invalid_argument("instance: distances must be finite and >= 0");
  }
  if (pilots_to_open < 1 || pilots_to_open > eligible()) {
    throw std::invalid_argument(fmt::format("instance: P={} outside [1, {}]", pilots_to_open, eligible()));
  }
  if (std::isnan(capacity) || capacity <= 0.0) throw std::invalid_argument("instance: P_cap must be positive");
}

void Assignment::assign_only(std::size_t i, std::size_t j) {
  for (std::size_t q = 0; q < eligible_; ++q) set_y(i, q, false);
  set_y(i, j, true);
}

std::vector<std::size_t> Assignment::open_pilots() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < eligible_; ++j) {
    if (is_open(j)) out.push_back(j);
  }
  return out;
}

std::size_t Assignment::open_count() const {
  std::size_t n = 0;
  for (auto z : open_) n += z;
  return n;
}

std::size_t Assignment::row_count(std::size_t i) const {
  std::size_t n = 0;
  for (std::size_t j = 0; j < eligible_; ++j) n += y(i, j) ? 1 : 0;
  return n;
}

std::vector<std::int64_t> Assignment::member_pilots() const {
  std::vector<std::int64_t> out(members_, -1);
  for (std::size_t i = 0; i < members_; ++i) {
    if (row_count(i) != 1) continue;
    for (std::size_t j = 0; j < eligible_; ++j) {
      if (y(i, j)) out[i] = static_cast<std::int64_t>(j);
    }
  }
  return out;
}

double objective(const Instance& inst, const Assignment& a) {
  check_dims(inst, a);
  double total = 0.0;
  for (std::size_t j = 0; j < inst.eligible(); ++j) {
    for (std::size_t i = 0; i < inst.members(); ++i) {
      if (a.y(i, j)) total += inst.cost(i, j);
    }
  }
  return total;
}

double pilot_load(const Instance& inst, const Assignment& a, std::size_t j, CapacityModel model) {
  check_dims(inst, a);
  double load = a.is_open(j) ? inst.fixed_load(j, model) : 0.0;
  for (std::size_t i = 0; i < inst.members(); ++i) {
    if (a.y(i, j)) load += inst.weight(i, j, model);
  }
  return load;
}

AuditResult audit(const Instance& inst, const Assignment& a, CapacityModel model) {
  check_dims(inst, a);
  AuditResult r;
  r.pilot_count_ok = a.open_count() == inst.pilots_to_open;
  r.coverage_ok = true;
  r.assignment_open_ok = true;
  for (std::size_t i = 0; i < inst.members(); ++i) {
    if (a.row_count(i) != 1) r.coverage_ok = false;
    for (std::size_t j = 0; j < inst.eligible(); ++j) {
      if (a.y(i, j) && !a.is_open(j)) r.assignment_open_ok = false;
    }
  }
  if (inst.capacitated()) {
    for (std::size_t j = 0; j < inst.eligible(); ++j) {
      if (a.is_open(j) && exceeds_capacity(pilot_load(inst, a, j, model), inst.capacity)) ++r.capacity_violations;
    }
  }
  return r;
}

}  // namespace pilotmesh::pmedian
