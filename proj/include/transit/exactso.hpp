#pragma once

#include <optional>
#include <string>

#include "transit/adafw.hpp"
#include "transit/model_ir.hpp"
#include "transit/schedule.hpp"

namespace transit {

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BackendError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact SO integer-linear model: no denied boarding, connections resolved
// at build time so boarding equalities become train-to-train flow
// equalities. Options whose connection chain dies are omitted.
ModelIR build_ilp(const ScheduleIndex& index);

struct SolveResult {
  std::string status;  // optimal | infeasible | limit
  double objective = 0;
  std::map<std::string, double> values;
  std::string solver_name;
  double wall_time_sec = 0;
};

// External MILP solver adapter: writes the model file, invokes the backend
// executable, parses its solution file. Backends are resolved from
// TRANSIT_SO_BACKEND_PATH, a compiled-in default directory, then PATH.
SolveResult run_backend(const ModelIR& model, const std::string& backend,
                        double time_limit_sec = 0);

std::string resolve_backend_executable(const std::string& backend);

struct ExactResult {
  std::string status;  // optimal | limit
  Solution solution;
  std::string solver_name;
};

// Optimal schedule-based SO assignment via the ILP. Throws InfeasibleError
// when no denied-boarding-free assignment exists (the message reports
// demand against reachable seat capacity per line).
ExactResult solve_exact(const ScheduleIndex& index, const std::string& backend,
                        double time_limit_sec = 0);

// Exhaustive oracle for tiny instances: enumerates integer assignments over
// valid options, keeps denied-boarding-free capacity-feasible ones, and
// returns the cheapest (lexicographically smallest Q on ties). Throws
// SizeError when the search space exceeds max_configurations. Returns
// nullopt when no feasible assignment exists.
std::optional<Solution> brute_force_so(const ScheduleIndex& index,
                                       double max_configurations = 1e7);

}  // namespace transit
