#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>

#include "transit/options.hpp"

namespace transit {

struct SetupError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Per-option step sizes sigma = theta * od_gap_ratio * option_weight.
struct StepSizes {
  double theta = 0;
  std::vector<double> od_gap_ratio;                             // per OD, in [0,1]
  std::vector<std::vector<std::vector<double>>> option_weight;  // [k][route_pos][train]
  std::vector<std::vector<std::vector<double>>> sigma;          // same shape
};

struct SolverConfig {
  int max_system_iters = 200;
  int max_od_iters = 50000;     // hard guard on OD-loop evaluations
  int od_stall_limit = 200;     // consecutive non-improving draws before certification
  double golden_section_tol = 1e-3;
  std::uint64_t rng_seed = 1;
  double convergence_eps = 1e-9;
  std::ostream* progress = nullptr;  // JSON lines when non-null
};

enum class Objective { kUserEquilibrium, kApproxSystemOptimum };

struct Solution {
  AssignmentQ q;
  FlowState flow;
  CostBreakdown costs;
  double objective = 0;  // gap for UE, total cost for approximate SO
  long iterations = 0;
  double wall_time_sec = 0;
};

// Minimizes a unimodal objective over [lo, hi]; returns the midpoint of the
// final interval, within tol of a local minimizer.
double golden_section(const std::function<double(double)>& evaluate, double lo, double hi,
                      double tol);

// Gap-weighted per-option step sizes for the system-based shifting loop.
// The ratio is clamped to [0,1]; a zero non-optimal average yields zero.
StepSizes step_sizes(const ScheduleIndex& index, const OptionCostTable& table,
                     const AssignmentQ& q, double theta);

// One Frank-Wolfe move: scales non-optimal options down by sigma and closes
// each OD onto its best option, preserving OD totals exactly.
AssignmentQ apply_step(const ScheduleIndex& index, const OptionCostTable& table,
                       const AssignmentQ& q, double theta);

// Initial assignment: all demand on the cheapest free-flow option per OD
// when that loads feasibly, otherwise a capacity-aware greedy spread.
AssignmentQ initial_assignment(const ScheduleIndex& index);

// Adaptive Frank-Wolfe: continuous system-based shifting, integer rounding,
// then one-passenger OD-based shifting until no single move to a best
// option improves the objective.
Solution solve(const ScheduleIndex& index, Objective objective, const SolverConfig& config = {});

// CSV rows od,train,route,passengers for every used option.
std::string assignment_csv(const ScheduleIndex& index, const AssignmentQ& q);

}  // namespace transit
