#include "pilotmesh/pmedian/lagrangian.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace pilotmesh::pmedian {

namespace {
void check_multipliers(const Instance& inst, const Multipliers& mult) {
  if (mult.lambda.size() != inst.eligible() || mult.mu.size() != inst.members()) {
    throw std::invalid_argument(fmt::format("multipliers sized ({}, {}) for a {}x{} instance", mult.lambda.size(),
                                            mult.mu.size(), inst.members(), inst.eligible()));
  }
  for (double l : mult.lambda) {
    if (l < 0.0) throw std::invalid_argument("lambda must be non-negative");
  }
}
}  // namespace

Multipliers Multipliers::initial(const Instance& inst) {
  Multipliers mult;
  const double total = std::accumulate(inst.pilot_data.begin(), inst.pilot_data.end(), 0.0);
  const double lambda0 = inst.capacitated() && total > 0.0 ? 1.0 / total : 0.0;
  mult.lambda.assign(inst.eligible(), lambda0);
  mult.mu.assign(inst.members(), static_cast<double>(inst.members()));
  return mult;
}

double lagrangian_value(const Instance& inst, const Assignment& a, const Multipliers& mult, CapacityModel model) {
  check_multipliers(inst, mult);
  double value = objective(inst, a);
  if (inst.capacitated()) {
    for (std::size_t j = 0; j < inst.eligible(); ++j) {
      value += mult.lambda[j] * (pilot_load(inst, a, j, model) - inst.capacity);
    }
  }
  for (std::size_t i = 0; i < inst.members(); ++i) {
    value += mult.mu[i] * (1.0 - static_cast<double>(a.row_count(i)));
  }
  return value;
}

double reduced_cost(const Instance& inst, const Multipliers& mult, std::size_t i, std::size_t q, CapacityModel model) {
  return inst.cost(i, q) + mult.lambda[q] * inst.weight(i, q, model) - mult.mu[i];
}

std::vector<double> subproblem_scores(const Instance& inst, const Multipliers& mult, CapacityModel model) {
  check_multipliers(inst, mult);
  std::vector<double> v(inst.eligible(), 0.0);
  for (std::size_t q = 0; q < inst.eligible(); ++q) {
    double s = mult.lambda[q] * inst.fixed_load(q, model);
    for (std::size_t i = 0; i < inst.members(); ++i) {
      s += std::min(0.0, reduced_cost(inst, mult, i, q, model));
    }
    v[q] = s;
  }
  return v;
}

std::vector<std::size_t> select_pilots(const std::vector<double>& scores, std::size_t count) {
  if (count > scores.size()) {
    throw std::invalid_argument(fmt::format("select_pilots: P={} exceeds {} candidates", count, scores.size()));
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  order.resize(count);
  std::sort(order.begin(), order.end());
  return order;
}

Assignment assign_members(const Instance& inst, const std::vector<std::size_t>& open, const Multipliers& mult,
                          CapacityModel model) {
  check_multipliers(inst, mult);
  Assignment a(inst.members(), inst.eligible());
  for (std::size_t r : open) {
    a.set_open(r, true);
    for (std::size_t i = 0; i < inst.members(); ++i) {
      if (reduced_cost(inst, mult, i, r, model) < 0.0) a.set_y(i, r, true);
    }
  }
  return a;
}

double dual_value(const Instance& inst, const std::vector<std::size_t>& open, const std::vector<double>& scores,
                  const Multipliers& mult) {
  double value = 0.0;
  for (std::size_t r : open) value += scores[r];
  for (double mu : mult.mu) value += mu;
  if (inst.capacitated()) {
    for (std::size_t j = 0; j < inst.eligible(); ++j) value -= mult.lambda[j] * inst.capacity;
  }
  return value;
}

double Subgradients::squared_norm() const {
  double s = 0.0;
  for (double g : capacity) s += g * g;
  for (double g : coverage) s += g * g;
  return s;
}

Subgradients subgradients(const Instance& inst, const Assignment& a, CapacityModel model) {
  Subgradients g;
  g.capacity.assign(inst.eligible(), 0.0);
  if (inst.capacitated()) {
    for (std::size_t j = 0; j < inst.eligible(); ++j) g.capacity[j] = pilot_load(inst, a, j, model) - inst.capacity;
  }
  g.coverage.resize(inst.members());
  for (std::size_t i = 0; i < inst.members(); ++i) g.coverage[i] = 1.0 - static_cast<double>(a.row_count(i));
  return g;
}

double polyak_step(double scale, double gap, const Subgradients& g) {
  const double norm = g.squared_norm();
  if (norm == 0.0) return 0.0;
  return scale * gap / norm;
}

double step_size(const Instance& inst, const Assignment& a, double scale, double dual, CapacityModel model) {
  return polyak_step(scale, 0.01 * dual, subgradients(inst, a, model));
}

Multipliers update_multipliers(const Multipliers& mult, double t, const Subgradients& g, SignConvention sign) {
  if (g.capacity.size() != mult.lambda.size() || g.coverage.size() != mult.mu.size()) {
    throw std::invalid_argument("update_multipliers: subgradient sizes do not match multipliers");
  }
  const double dir = sign == SignConvention::kAscent ? 1.0 : -1.0;
  Multipliers next = mult;
  for (std::size_t j = 0; j < next.lambda.size(); ++j) {
    next.lambda[j] = std::max(0.0, mult.lambda[j] + dir * t * g.capacity[j]);
  }
  for (std::size_t i = 0; i < next.mu.size(); ++i) {
    next.mu[i] = std::max(0.0, mult.mu[i] + dir * t * g.coverage[i]);
  }
  return next;
}

double initial_step_scale(std::size_t members) {
  if (members < 1) throw std::invalid_argument("initial_step_scale: m must be at least 1");
  return std::max(kStepScaleFloor, 0.017 * static_cast<double>(members) - 2.9412);
}

}  // namespace pilotmesh::pmedian
