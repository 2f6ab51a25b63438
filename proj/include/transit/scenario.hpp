#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "transit/adafw.hpp"
#include "transit/schedule.hpp"

namespace transit {

struct ScenarioSpec {
  double demand_scale = 100;    // percent
  double capacity_scale = 100;  // percent, floor-rounded per train
  // When set, only these routes stay enabled (e.g. the "base" group).
  std::optional<std::vector<RouteId>> enabled_routes;
  std::string label;
};

// New immutable instance with scaled integer demands (largest-remainder per
// OD against the scaled total), floor-scaled capacities and filtered routes.
// Throws std::invalid_argument when an OD would lose all routes.
TransitInstance apply_scenario(const TransitInstance& instance, const ScenarioSpec& spec);

// Routes whose group matches (e.g. "base"); convenience for route toggles.
std::vector<RouteId> routes_in_group(const TransitInstance& instance, const std::string& group);

// Potential system cost improvement ratio, 1 - so/ue.
double pscir(double ue_cost, double so_cost);

// Minimum passengers per OD who must change option between two assignments:
// half the L1 distance over (train, route) options.
std::vector<double> impacted_passengers(const AssignmentQ& q_ue, const AssignmentQ& q_so);

// Per-OD cost gap divided by impacted count; zero when nobody is impacted,
// negative when the system asks the OD to get worse.
std::vector<double> contribution_per_passenger(const std::vector<double>& cost_ue,
                                               const std::vector<double>& cost_so,
                                               const std::vector<double>& impacted);

// Departure-time shift profile between two assignments. Unmoved passengers
// (per-option overlap) sit in the zero bin; moved passengers are coupled
// monotonically within each route first, then across routes by nearest
// departure minute.
struct ShiftHistogram {
  std::map<int, double> bins;   // shift minutes -> passengers (moved only)
  double unmoved = 0;           // per-option overlap mass
  double moved_total() const {
    double total = 0;
    for (const auto& [shift, mass] : bins) total += mass;
    return total;
  }
};
ShiftHistogram shift_histogram(const ScheduleIndex& index, const AssignmentQ& q_ue,
                               const AssignmentQ& q_so);

// Passengers crossing one leg per train, keyed by departure time at the
// leg's from-station. Zero-flow trains are flagged (stop-skip candidates).
struct LinkFlowPoint {
  int train = 0;
  Minutes departure = 0;
  double passengers = 0;
  bool zero_flow = false;
};
std::vector<LinkFlowPoint> link_flows(const ScheduleIndex& index, const FlowState& flow,
                                      LineId line, int leg_pos);

// One UE / approximate-SO / exact-SO comparison on a single instance.
struct ComparisonReport {
  CostBreakdown ue_costs, so_costs;
  double ue_total = 0, so_total = 0;
  double improvement_ratio = 0;  // pscir
  std::vector<double> impacted;
  std::vector<double> contribution;
  ShiftHistogram shifts;
};
ComparisonReport compare_assignments(const ScheduleIndex& index, const Solution& ue,
                                     const Solution& so);

struct MatrixCell {
  std::string scenario;
  std::string solver;
  bool ok = false;
  std::string error;
  double total_cost = 0;
  double improvement_ratio = 0;  // vs the UE cell of the same scenario
};

// Runs each solver on each scenario; failed cells carry their error and the
// matrix is still returned. Cells are seeded independently, so results are
// reproducible regardless of execution order.
std::vector<MatrixCell> run_matrix(const TransitInstance& base,
                                   const std::vector<ScenarioSpec>& scenarios,
                                   const std::vector<std::string>& solvers,
                                   const std::string& backend, std::uint64_t seed);

std::string comparison_csv(const ScheduleIndex& index, const ComparisonReport& report);
std::string shift_histogram_csv(const ShiftHistogram& histogram);
std::string link_flows_csv(const ScheduleIndex& index, const FlowState& flow);
std::string matrix_csv(const std::vector<MatrixCell>& cells);

}  // namespace transit
