#pragma once

#include <string>
#include <vector>

#include "transit/loader.hpp"
#include "transit/schedule.hpp"

namespace transit {

struct FeasibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Kernel execution policy. Parallel kernels write per-OD slots and reduce
// in fixed order, so both policies produce identical bits.
enum class Exec { kSerial, kParallel };

struct OdCost {
  double ivcst = 0;  // in-vehicle
  double chcst = 0;  // transfer waits
  double dbcst = 0;  // denied-boarding waits
  double elcst = 0;  // early/late arrival penalty
  double total() const { return ivcst + chcst + dbcst + elcst; }
};

struct CostBreakdown {
  std::vector<OdCost> per_od;
  double system_total = 0;
};

// Per-OD cost components of a loaded flow state, in dollars.
std::vector<double> in_vehicle_cost(const ScheduleIndex& index, const FlowState& flow);
std::vector<double> transfer_wait_cost(const ScheduleIndex& index, const FlowState& flow);
std::vector<double> denied_boarding_cost(const ScheduleIndex& index, const FlowState& flow);
std::vector<double> schedule_delay_cost(const ScheduleIndex& index, const FlowState& flow);

CostBreakdown cost_breakdown(const ScheduleIndex& index, const FlowState& flow,
                             Exec exec = Exec::kParallel);

// CSV report: od,ivcst,chcst,dbcst,elcst,total with dollars at 2 decimals.
std::string od_costs_csv(const ScheduleIndex& index, const CostBreakdown& costs);

}  // namespace transit
