#include "pilotmesh/pmedian/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace pilotmesh::pmedian {

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::kZeroSubgradient: return "zero_subgradient";
    case StopReason::kGapClosed: return "gap_closed";
    case StopReason::kMaxIterations: return "max_iterations";
    case StopReason::kStepScaleExhausted: return "step_scale_exhausted";
  }
  return "unknown";
}

SolverOptions SolverOptions::as_printed() {
  SolverOptions o;
  o.sign = SignConvention::kAsPrinted;
  o.step_rule = StepRule::kScaledDual;
  o.halving = HalvingRule::kDualChange;
  o.clamp_gap_scale = false;
  o.scale_capacity_rows = false;
  o.pilot_swap = false;
  return o;
}

void SolverOptions::validate() const {
  if (max_iter < 1) throw std::invalid_argument("solver: max_iter must be at least 1");
  if (!(delta > 0.0)) throw std::invalid_argument("solver: delta must be positive");
  if (stall_window < 1) throw std::invalid_argument("solver: stall_window must be at least 1");
}

std::string infeasibility_reason(const Instance& inst, CapacityModel model) {
  if (!inst.capacitated()) return {};
  const std::size_t m = inst.members();
  const std::size_t e = inst.eligible();
  const std::size_t P = inst.pilots_to_open;
  const double total_demand = std::accumulate(inst.demands.begin(), inst.demands.end(), 0.0);

  for (std::size_t i = 0; i < m; ++i) {
    bool fits = false;
    for (std::size_t j = 0; j < e && !fits; ++j) {
      fits = !exceeds_capacity(inst.fixed_load(j, model) + inst.weight(i, j, model), inst.capacity);
    }
    if (!fits) return fmt::format("member {} fits on no pilot within P_cap={}", i, inst.capacity);
  }

  std::vector<double> dj = inst.pilot_data;
  std::sort(dj.begin(), dj.end());
  double least_total = total_demand;
  if (model == CapacityModel::per_member) {
    least_total += static_cast<double>(m) * dj.front();
  } else {
    least_total += std::accumulate(dj.begin(), dj.begin() + static_cast<std::ptrdiff_t>(P), 0.0);
  }
  if (exceeds_capacity(least_total, static_cast<double>(P) * inst.capacity)) {
    return fmt::format("least possible total load {} exceeds P*P_cap={}", least_total,
                       static_cast<double>(P) * inst.capacity);
  }
  return {};
}

namespace {

struct Candidate {
  Assignment assignment;
  double objective = std::numeric_limits<double>::infinity();
  std::size_t violations = std::numeric_limits<std::size_t>::max();
  double overload = std::numeric_limits<double>::infinity();
  bool repaired = false;
  bool valid = false;
};

Candidate evaluate(const Instance& inst, const Assignment& relaxed, const SolverOptions& opts) {
  // Primal candidates come from the pilot set only; the relaxed Y decides
  // whether the iterate needed repair.
  Assignment open_only(inst.members(), inst.eligible());
  for (std::size_t j : relaxed.open_pilots()) open_only.set_open(j, true);
  RepairResult r = repair_feasibility(inst, open_only, opts.capacity_model, opts.repair);
  Candidate c;
  c.objective = objective(inst, r.assignment);
  c.violations = r.capacity_violations;
  c.overload = 0.0;
  if (inst.capacitated()) {
    for (std::size_t j = 0; j < inst.eligible(); ++j) c.overload += std::max(0.0, r.loads[j] - inst.capacity);
  }
  c.repaired = !audit(inst, relaxed, opts.capacity_model).feasible();
  c.assignment = std::move(r.assignment);
  c.valid = true;
  return c;
}

bool better(const Candidate& a, const Candidate& b) {
  if (!b.valid) return a.valid;
  const bool fa = a.violations == 0;
  const bool fb = b.violations == 0;
  if (fa != fb) return fa;
  if (fa) return a.objective < b.objective;
  if (a.violations != b.violations) return a.violations < b.violations;
  if (a.overload != b.overload) return a.overload < b.overload;
  return a.objective < b.objective;
}

Candidate pilot_swap_phase(const Instance& inst, Candidate best, const SolverOptions& opts) {
  const std::size_t e = inst.eligible();
  std::size_t rounds = 0;
  bool improved = true;
  while (improved && best.violations > 0 && rounds++ < 4 * e) {
    improved = false;
    const auto open = best.assignment.open_pilots();
    for (std::size_t out : open) {
      for (std::size_t in = 0; in < e && !improved; ++in) {
        if (best.assignment.is_open(in)) continue;
        Assignment z(inst.members(), e);
        for (std::size_t j : open) z.set_open(j, j != out);
        z.set_open(in, true);
        Candidate c = evaluate(inst, z, opts);
        c.repaired = true;
        if (better(c, best)) {
          best = std::move(c);
          improved = true;
        }
      }
      if (improved) break;
    }
  }
  return best;
}

}  // namespace

SolveReport solve(const Instance& inst, const SolverOptions& opts) {
  inst.validate();
  opts.validate();
  if (auto reason = infeasibility_reason(inst, opts.capacity_model); !reason.empty()) {
    throw InfeasibleInstance("infeasible instance: " + reason);
  }

  const std::size_t m = inst.members();
  double A = initial_step_scale(m);
  if (opts.step_rule == StepRule::kIncumbentGap && opts.clamp_gap_scale) A = std::clamp(A, 1.0, 2.0);

  Multipliers mult = Multipliers::initial(inst);
  Candidate best;
  double best_dual = -std::numeric_limits<double>::infinity();
  double prev_dual = 0.0;
  std::size_t stall = 0;

  SolveReport report;
  report.stop = StopReason::kMaxIterations;

  for (std::size_t k = 1; k <= opts.max_iter; ++k) {
    const auto scores = subproblem_scores(inst, mult, opts.capacity_model);
    const auto open = select_pilots(scores, inst.pilots_to_open);
    const Assignment relaxed = assign_members(inst, open, mult, opts.capacity_model);
    const double M = dual_value(inst, open, scores, mult);
    const double prev_best = best_dual;
    best_dual = std::max(best_dual, M);

    Candidate cand = evaluate(inst, relaxed, opts);
    const double primal = cand.objective;
    if (better(cand, best)) best = std::move(cand);

    const Subgradients g = subgradients(inst, relaxed, opts.capacity_model);
    IterationRecord rec{k, M, best_dual, primal, best.objective, A, 0.0};
    report.iterations = k;

    if (g.squared_norm() == 0.0) {
      report.trace.push_back(rec);
      report.stop = StopReason::kZeroSubgradient;
      break;
    }
    if (best.violations == 0 && best.objective - best_dual <= 1e-9 * std::max(1.0, std::abs(best.objective))) {
      report.trace.push_back(rec);
      report.stop = StopReason::kGapClosed;
      break;
    }

    double numerator = 0.01 * M;
    if (opts.step_rule == StepRule::kIncumbentGap) {
      numerator = best.objective - M;
      if (!(numerator > 0.0)) numerator = 0.01 * std::abs(M);
    }
    Subgradients step_g = g;
    Subgradients move_g = g;
    if (opts.scale_capacity_rows && inst.capacitated()) {
      for (std::size_t j = 0; j < g.capacity.size(); ++j) {
        step_g.capacity[j] = g.capacity[j] / inst.capacity;
        move_g.capacity[j] = g.capacity[j] / (inst.capacity * inst.capacity);
      }
    }
    const double t = std::max(0.0, polyak_step(A, numerator, step_g));
    rec.step = t;
    report.trace.push_back(rec);
    mult = update_multipliers(mult, t, move_g, opts.sign);

    if (opts.halving == HalvingRule::kDualChange) {
      if (k > 1 && std::abs(M - prev_dual) <= opts.delta * std::max(1.0, std::abs(prev_dual))) A /= 2.0;
    } else if (k > 1) {
      if (best_dual - prev_best <= opts.delta * std::max(1.0, std::abs(prev_best))) {
        if (++stall >= opts.stall_window) {
          A /= 2.0;
          stall = 0;
        }
      } else {
        stall = 0;
      }
    }
    prev_dual = M;
    if (A < opts.min_step_scale) {
      report.stop = StopReason::kStepScaleExhausted;
      break;
    }
  }

  if (opts.pilot_swap && best.violations > 0) best = pilot_swap_phase(inst, std::move(best), opts);

  report.assignment = std::move(best.assignment);
  report.primal_objective = best.objective;
  report.dual_bound = best_dual;
  report.repaired = best.repaired;
  report.capacity_violations = best.violations;
  spdlog::debug("solve: m={} e={} P={} iterations={} stop={} primal={} dual={} violations={}", m, inst.eligible(),
                inst.pilots_to_open, report.iterations, to_string(report.stop), report.primal_objective,
                report.dual_bound, report.capacity_violations);
  return report;
}

std::size_t convergence_iteration(const std::vector<IterationRecord>& trace, double delta) {
  std::size_t last = trace.empty() ? 0 : 1;
  for (std::size_t k = 1; k < trace.size(); ++k) {
    const double prev = trace[k - 1].best_dual;
    if (trace[k].best_dual - prev > delta * std::max(1.0, std::abs(prev))) last = k + 1;
  }
  return last;
}

}  // namespace pilotmesh::pmedian
