#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pilotmesh/pmedian/instance.hpp"
#include "pilotmesh/pmedian/lagrangian.hpp"
#include "pilotmesh/pmedian/repair.hpp"

namespace pilotmesh::pmedian {

/// Numerator of the Polyak step.
enum class StepRule {
  kScaledDual,    ///< 0.01 * M(lambda, mu), as published
  kIncumbentGap,  ///< best primal objective minus M(lambda, mu)
};

/// When the step scale A is halved.
enum class HalvingRule {
  kDualChange,  ///< |M(k+1) - M(k)| <= delta relative, as published
  kStall,       ///< best dual has not improved by more than delta for `stall_window` iterations
};

enum class StopReason { kZeroSubgradient, kGapClosed, kMaxIterations, kStepScaleExhausted };

std::string to_string(StopReason r);

struct SolverOptions {
  std::size_t max_iter = 200;
  double delta = 1e-3;
  CapacityModel capacity_model = CapacityModel::per_member;
  SignConvention sign = SignConvention::kAscent;
  StepRule step_rule = StepRule::kIncumbentGap;
  HalvingRule halving = HalvingRule::kStall;
  std::size_t stall_window = 3;
  /// Under kIncumbentGap the initial A is clamped into [1, 2].
  bool clamp_gap_scale = true;
  /// The run stops once A drops below this.
  double min_step_scale = 1e-6;
  RepairOptions repair{};
  /// Capacity rows divided by P_cap for the step: the same Lagrangian with
  /// lambda measured per unit of capacity.
  bool scale_capacity_rows = true;
  /// Try single open/closed pilot exchanges when the incumbent still violates capacity.
  bool pilot_swap = true;

  /// Every rule exactly as published.
  static SolverOptions as_printed();
  void validate() const;
};

struct IterationRecord {
  std::size_t k = 0;
  double dual = 0.0;       ///< M(lambda, mu) at this iterate
  double best_dual = 0.0;  ///< running maximum
  double primal = 0.0;     ///< repaired objective of this iterate's pilot set
  double best_primal = 0.0;
  double step_scale = 0.0;  ///< A used for this iterate's step
  double step = 0.0;        ///< t
};

struct SolveReport {
  Assignment assignment;
  double primal_objective = 0.0;
  double dual_bound = 0.0;
  std::size_t iterations = 0;
  bool repaired = false;  ///< the relaxed assignment of the incumbent needed repair
  std::size_t capacity_violations = 0;
  StopReason stop = StopReason::kMaxIterations;
  std::vector<IterationRecord> trace;

  std::vector<std::size_t> open_pilots() const { return assignment.open_pilots(); }
  std::vector<std::int64_t> member_pilots() const { return assignment.member_pilots(); }
};

class InfeasibleInstance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sound infeasibility screen: returns a reason string when no assignment can
/// respect P_cap, or an empty string when the screen passes.
std::string infeasibility_reason(const Instance& inst, CapacityModel model);

/// Lagrangian relaxation with subgradient optimization. Throws
/// InfeasibleInstance when the screen proves the instance infeasible and
/// std::invalid_argument on malformed input.
SolveReport solve(const Instance& inst, const SolverOptions& opts = {});

/// Last iteration (1-based) whose best dual improved by more than delta
/// relative to the previous best; 1 when it never did after the first.
std::size_t convergence_iteration(const std::vector<IterationRecord>& trace, double delta);

}  // namespace pilotmesh::pmedian
