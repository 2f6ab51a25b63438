#pragma once

#include <vector>

#include "transit/assignment.hpp"
#include "transit/costs.hpp"
#include "transit/loader.hpp"
#include "transit/schedule.hpp"

namespace transit {

// A contiguous block of passengers sharing origin and arrival trains, with
// their common travel cost. Integer-mode blocks have integral mass.
struct PassengerChunk {
  int arrival_train = 0;
  double mass = 0;
  double cost = 0;
};

struct OptionEntry {
  bool valid = false;   // option has a live connection chain
  double avc = 0;       // average cost over its passengers; avc0 when unused
  double avc0 = 0;      // free-flow cost
  double q = 0;
  std::vector<PassengerChunk> chunks;  // empty when q == 0
};

// Average and per-passenger option costs attributed from a loaded flow
// state under FIFO within each (OD, route) group.
struct OptionCostTable {
  std::vector<std::vector<std::vector<OptionEntry>>> entries;  // [k][route_pos][train]
  std::vector<double> avc_star;                                // per OD, over valid options
  std::vector<int> valid_options;                              // per OD

  const OptionEntry& at(OdId k, int p, int t) const {
    return entries[static_cast<size_t>(k)][static_cast<size_t>(p)][static_cast<size_t>(t)];
  }
};

// Builds the table for Q and its loaded flow state. Requires a feasible
// load; throws std::logic_error when arrivals cannot cover departures.
OptionCostTable attribute_costs(const ScheduleIndex& index, const AssignmentQ& q,
                                const FlowState& flow, Exec exec = Exec::kParallel);

// Total gap between chosen and best options: zero exactly at equilibrium.
double ue_gap(const OptionCostTable& table, const AssignmentQ& q);

// Best option per OD (minimum avc; ties to lowest train then route order).
OptionRef best_option(const OptionCostTable& table, OdId k);

// All-demand-on-best-option target vertex.
AssignmentQ direction(const ScheduleIndex& index, const OptionCostTable& table,
                      const AssignmentQ& q);

}  // namespace transit
