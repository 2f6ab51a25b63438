#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "transit/types.hpp"

namespace transit {

struct TopologyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Geometry of one route segment resolved against the line definitions.
struct SegmentGeometry {
  LineId line = 0;
  int board_pos = 0;    // 0-based station position on the line
  int alight_pos = 0;   // board_pos < alight_pos
  Minutes ride_time = 0;  // sum of leg durations board_pos..alight_pos-1
};

// Free-flow trajectory of one (origin train, route) option: the train taken
// on every segment when no boarding is ever denied.
struct OptionChain {
  bool valid = false;             // false when a connection chain dies
  std::vector<int> train_per_segment;
  Minutes arrival_time = 0;       // at the OD destination
  Minutes total_transfer_wait = 0;
};

// A single (train, station) visit, precomputed and time-sorted. Arrivals
// sort before departures at equal timestamps so same-minute transfers and
// boardings succeed.
struct ScheduleEvent {
  Minutes time = 0;
  enum Kind { kArrival = 0, kDeparture = 1 } kind = kArrival;
  LineId line = 0;
  int train = 0;  // index on line
  int pos = 0;    // station position on line
};

// Derived schedule topology: station positions, departure times, transfer
// connections, per-route geometry and free-flow chains. Built once per
// instance and shared read-only.
class ScheduleIndex {
 public:
  explicit ScheduleIndex(const TransitInstance& instance);
  // the index only references the instance, which must outlive it
  explicit ScheduleIndex(TransitInstance&&) = delete;

  const TransitInstance& instance() const { return *instance_; }

  // -1 when the station is not on the line.
  int position_on_line(LineId line, StationId station) const;

  // Departure of the train from station position pos; arrival time is the
  // same by model assumption.
  Minutes departure_time(LineId line, int train, int pos) const;
  Minutes arrival_time(LineId line, int train, int pos) const {
    return departure_time(line, train, pos);
  }

  // Earliest train on target_line departing `station` at or after
  // `arrival`; same-minute departures are catchable. nullopt when no such
  // train exists. Throws TopologyError when the station is off the line.
  std::optional<int> next_connection(StationId station, Minutes arrival,
                                     LineId target_line) const;

  const std::vector<SegmentGeometry>& segments(RouteId r) const {
    return route_segments_[static_cast<size_t>(r)];
  }
  Minutes route_ride_time(RouteId r) const { return route_ride_time_[static_cast<size_t>(r)]; }

  // Chain for option (origin train t, route r); t indexes the first
  // segment's line.
  const OptionChain& chain(RouteId r, int origin_train) const {
    return chains_[static_cast<size_t>(r)][static_cast<size_t>(origin_train)];
  }
  int option_train_count(RouteId r) const {
    return static_cast<int>(chains_[static_cast<size_t>(r)].size());
  }

  // Uncongested cost of option (k, t, r): in-vehicle + transfer waits +
  // schedule delay. Throws UnservableOptionError on a dead chain.
  double free_flow_cost(OdId k, int origin_train, RouteId r) const;

  // Global leg numbering: legs of line 0 first, then line 1, ...
  int leg_id(LineId line, int leg_pos) const {
    return leg_id_offset_[static_cast<size_t>(line)] + leg_pos;
  }
  int total_legs() const { return total_legs_; }

  const std::vector<ScheduleEvent>& events() const { return events_; }

  // Stations where the route boards (origin and each transfer), as
  // (segment index, line, station position) triples.
  struct BoardingPoint {
    int segment = 0;
    LineId line = 0;
    int pos = 0;
    StationId station = 0;
  };
  const std::vector<BoardingPoint>& boarding_points(RouteId r) const {
    return boarding_points_[static_cast<size_t>(r)];
  }

 private:
  const TransitInstance* instance_;
  // position_[line][station] via flat lookup table keyed by station id.
  std::vector<std::vector<int>> position_;
  int max_station_id_ = 0;
  std::vector<std::vector<Minutes>> prefix_duration_;  // per line, per pos
  std::vector<int> leg_id_offset_;
  int total_legs_ = 0;
  std::vector<std::vector<SegmentGeometry>> route_segments_;
  std::vector<Minutes> route_ride_time_;
  std::vector<std::vector<OptionChain>> chains_;  // [route][origin train]
  std::vector<std::vector<BoardingPoint>> boarding_points_;
  std::vector<ScheduleEvent> events_;
};

struct UnservableOptionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace transit
