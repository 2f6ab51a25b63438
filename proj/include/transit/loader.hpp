#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "transit/assignment.hpp"
#include "transit/schedule.hpp"
#include "transit/types.hpp"

namespace transit {

// Loaded network state. Flows are stored per (OD, route position, segment):
// f per (train on the segment's line, leg within the segment), g and db per
// train at the segment's boarding station. Waiting can only occur at
// boarding stations, so zero-wait elsewhere holds by representation.
class FlowState {
 public:
  FlowState() = default;
  FlowState(const ScheduleIndex& index, AssignmentQ::Mode mode);

  AssignmentQ::Mode mode() const { return mode_; }

  double f(OdId k, int p, int seg, int train, int leg_off) const {
    return f_[idx(k, p)][static_cast<size_t>(seg)]
             [static_cast<size_t>(train * seg_legs(k, p, seg) + leg_off)];
  }
  double& f(OdId k, int p, int seg, int train, int leg_off) {
    return f_[idx(k, p)][static_cast<size_t>(seg)]
             [static_cast<size_t>(train * seg_legs(k, p, seg) + leg_off)];
  }
  double g(OdId k, int p, int seg, int train) const {
    return g_[idx(k, p)][static_cast<size_t>(seg)][static_cast<size_t>(train)];
  }
  double& g(OdId k, int p, int seg, int train) {
    return g_[idx(k, p)][static_cast<size_t>(seg)][static_cast<size_t>(train)];
  }
  double db(OdId k, int p, int seg, int train) const {
    return db_[idx(k, p)][static_cast<size_t>(seg)][static_cast<size_t>(train)];
  }
  double& db(OdId k, int p, int seg, int train) {
    return db_[idx(k, p)][static_cast<size_t>(seg)][static_cast<size_t>(train)];
  }

  // Total passengers on (line, train, leg) summed over all groups.
  double onboard(LineId line, int train, int leg_pos) const;
  double& onboard(LineId line, int train, int leg_pos);

  int seg_legs(OdId k, int p, int seg) const {
    return seg_legs_[idx(k, p)][static_cast<size_t>(seg)];
  }
  int seg_trains(OdId k, int p, int seg) const {
    return static_cast<int>(g_[idx(k, p)][static_cast<size_t>(seg)].size());
  }
  int route_count(OdId k) const { return routes_per_od_[static_cast<size_t>(k)]; }
  int od_count() const { return static_cast<int>(routes_per_od_.size()); }

 private:
  size_t idx(OdId k, int p) const {
    return od_offset_[static_cast<size_t>(k)] + static_cast<size_t>(p);
  }

  AssignmentQ::Mode mode_ = AssignmentQ::Mode::kInteger;
  std::vector<size_t> od_offset_;
  std::vector<int> routes_per_od_;
  // outer: flattened (k, p); middle: segment
  std::vector<std::vector<std::vector<double>>> f_;
  std::vector<std::vector<std::vector<double>>> g_;
  std::vector<std::vector<std::vector<double>>> db_;
  std::vector<std::vector<int>> seg_legs_;
  std::vector<std::vector<double>> onboard_;  // per line: trains x legs
  std::vector<int> line_legs_;
};

struct StrandedGroup {
  OdId od = 0;
  int route_pos = 0;
  StationId station = 0;
  double count = 0;
};

struct LoadResult {
  FlowState flow;
  bool feasible = false;
  std::vector<StrandedGroup> stranded;
  bool audit_ok = true;  // only meaningful when LoadOptions::audit is set
};

struct LoadOptions {
  bool audit = false;              // per-event conservation audit
  std::ostream* event_trace = nullptr;  // CSV rows when non-null
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Proportional boarding split: all groups board when they fit; otherwise
// each group boards residual/total of its count. Integer mode apportions by
// largest remainder with ties to the lower index. `waiting` is ordered by
// group key. Returns boarded counts per group.
std::vector<double> board(const std::vector<double>& waiting, double residual_capacity,
                          AssignmentQ::Mode mode);

// Event-based network loading of assignment Q under hard train capacity.
// Deterministic: identical (instance, Q) give identical FlowState.
LoadResult load(const ScheduleIndex& index, const AssignmentQ& q,
                const LoadOptions& options = {});

// Asserts every FlowState invariant against the instance and Q; returns
// named violations (empty on loader output).
std::vector<Violation> check_feasibility(const ScheduleIndex& index, const FlowState& flow,
                                         const AssignmentQ& q);

}  // namespace transit
