#pragma once

#include <cstddef>
#include <vector>

#include "pilotmesh/pmedian/instance.hpp"

namespace pilotmesh::pmedian {

/// lambda_j >= 0 prices pilot capacity, mu_i prices member coverage.
struct Multipliers {
  std::vector<double> lambda;
  std::vector<double> mu;

  /// lambda_j = 1 / sum_j d_j and mu_i = m. Uncapacitated instances keep
  /// lambda at zero since their capacity rows can never bind.
  static Multipliers initial(const Instance& inst);

  friend bool operator==(const Multipliers&, const Multipliers&) = default;
};

/// Which way the multipliers move along their subgradient.
enum class SignConvention {
  /// lambda - t*g and mu - t*g, the update rule exactly as published.
  kAsPrinted,
  /// lambda + t*g and mu + t*g, ascent on the dual function.
  kAscent,
};

/// M(lambda, mu) evaluated at the given (Z, Y):
///   objective + sum_j lambda_j (load_j - P_cap) + sum_i mu_i (1 - sum_j Y_ij).
/// Capacity terms are omitted for uncapacitated instances.
double lagrangian_value(const Instance& inst, const Assignment& a, const Multipliers& mult,
                        CapacityModel model = CapacityModel::per_member);

/// Reduced cost of putting member i on pilot q.
double reduced_cost(const Instance& inst, const Multipliers& mult, std::size_t i, std::size_t q, CapacityModel model);

/// V_q = sum_i min{0, d_i h_iq + lambda_q w_iq - mu_i}, plus lambda_q d_q when
/// the pilot's data is charged once on opening.
std::vector<double> subproblem_scores(const Instance& inst, const Multipliers& mult,
                                      CapacityModel model = CapacityModel::per_member);

/// The P pilots with the smallest scores, ties broken by ascending index.
/// Result is sorted ascending. Throws std::invalid_argument if P > scores.size().
std::vector<std::size_t> select_pilots(const std::vector<double>& scores, std::size_t count);

/// Relaxed assignment: Y_ir = 1 for every open r with a negative reduced cost.
/// A member may end up on zero or several pilots.
Assignment assign_members(const Instance& inst, const std::vector<std::size_t>& open, const Multipliers& mult,
                          CapacityModel model = CapacityModel::per_member);

/// Value of the Lagrangian dual function: the subproblem minimum at (lambda, mu).
/// This equals lagrangian_value at the assignment returned by assign_members.
double dual_value(const Instance& inst, const std::vector<std::size_t>& open, const std::vector<double>& scores,
                  const Multipliers& mult);

struct Subgradients {
  std::vector<double> capacity;  ///< load_j - P_cap per eligible pilot (zeros when uncapacitated)
  std::vector<double> coverage;  ///< 1 - sum_j Y_ij per member

  double squared_norm() const;
};

Subgradients subgradients(const Instance& inst, const Assignment& a, CapacityModel model = CapacityModel::per_member);

/// Polyak step t = A * gap / ||g||^2, with t = 0 when every subgradient vanished.
double polyak_step(double scale, double gap, const Subgradients& g);

/// The published rule: t = A * (0.01 M) / ||g||^2 with the subgradients taken at `a`.
double step_size(const Instance& inst, const Assignment& a, double scale, double dual,
                 CapacityModel model = CapacityModel::per_member);

/// Projected update; both multiplier families are clamped at zero.
Multipliers update_multipliers(const Multipliers& mult, double t, const Subgradients& g,
                               SignConvention sign = SignConvention::kAsPrinted);

/// A(1) = max(0.1, 0.017 m - 2.9412); the regression line is negative below m = 173.
double initial_step_scale(std::size_t members);

inline constexpr double kStepScaleFloor = 0.1;

}  // namespace pilotmesh::pmedian
