#pragma once

#include <string>
#include <vector>

namespace transit {

using StationId = int;  // global station identifier
using LineId = int;     // index into TransitInstance::lines
using RouteId = int;    // index into TransitInstance::routes
using OdId = int;       // index into TransitInstance::od_pairs
using Minutes = int;    // minutes after midnight

struct Station {
  StationId id = 0;
  std::string name;
};

// A directed service line. A bidirectional corridor is two Line records.
// Dwell times are folded into leg durations.
struct Line {
  LineId id = 0;
  std::string name;
  std::vector<StationId> stations;      // ordered, size >= 2, no repeats
  std::vector<Minutes> leg_durations;   // size == stations.size()-1, all > 0
};

struct Train {
  LineId line = 0;
  int index_on_line = 0;   // 0-based position in the line's train sequence
  Minutes start_time = 0;  // departure from the line's first station
  int capacity = 0;        // hard per-train passenger limit
};

struct RouteSegment {
  LineId line = 0;
  StationId board = 0;
  StationId alight = 0;
};

// An itinerary for one OD pair: consecutive segments chain at transfer
// stations shared by both lines.
struct Route {
  RouteId id = 0;
  OdId od = 0;
  std::vector<RouteSegment> segments;
  // Route availability tier; scenario analysis can restrict to "base".
  std::string group = "base";
};

struct ODPair {
  OdId id = 0;
  StationId origin = 0;
  StationId destination = 0;
  long demand = 0;                // passengers
  std::vector<RouteId> routes;    // nonempty, in preference-stable order
};

// Cost rates are stored per hour as configured and converted to $/minute
// where they are applied.
struct CostParams {
  double in_vehicle_per_hour = 6.0;
  double wait_per_hour = 18.0;
  double early_per_hour = 5.0;
  double late_per_hour = 12.0;
  Minutes target_arrival = 540;

  double in_vehicle_per_min() const { return in_vehicle_per_hour / 60.0; }
  double wait_per_min() const { return wait_per_hour / 60.0; }
  double early_per_min() const { return early_per_hour / 60.0; }
  double late_per_min() const { return late_per_hour / 60.0; }
};

// Immutable problem definition. Construct, validate(), then share freely
// across concurrent solver runs.
struct TransitInstance {
  std::string name;
  std::vector<Station> stations;
  std::vector<Line> lines;
  std::vector<std::vector<Train>> trains_by_line;  // indexed by LineId
  std::vector<ODPair> od_pairs;
  std::vector<Route> routes;  // indexed by RouteId
  CostParams cost_params;

  const Line& line(LineId l) const { return lines.at(static_cast<size_t>(l)); }
  const Route& route(RouteId r) const { return routes.at(static_cast<size_t>(r)); }
  const ODPair& od(OdId k) const { return od_pairs.at(static_cast<size_t>(k)); }
  const std::vector<Train>& trains(LineId l) const {
    return trains_by_line.at(static_cast<size_t>(l));
  }
  int train_count(LineId l) const { return static_cast<int>(trains(l).size()); }
  long total_demand() const {
    long total = 0;
    for (const auto& k : od_pairs) total += k.demand;
    return total;
  }
};

// One broken invariant, reported as data rather than an exception.
struct Violation {
  std::string entity;  // e.g. "line 2", "route 5"
  std::string rule;    // e.g. "route discontinuity"
  std::string detail;
};

// Checks every structural invariant of the instance; empty result means
// the instance is well formed.
std::vector<Violation> validate_instance(const TransitInstance& instance);

}  // namespace transit
