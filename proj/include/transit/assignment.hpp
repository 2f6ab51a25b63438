#pragma once

#include <cstdint>
#include <vector>

#include "transit/schedule.hpp"
#include "transit/types.hpp"

namespace transit {

// Decision variable: passengers per (OD, departing train, route), indexed by
// the route's position in ODPair::routes and the train's index on the
// route's first line. Integer mode means every entry is an integral double.
struct AssignmentQ {
  enum class Mode { kContinuous, kInteger };

  Mode mode = Mode::kInteger;
  // values[k][route_pos][train]
  std::vector<std::vector<std::vector<double>>> values;

  static AssignmentQ zeros(const ScheduleIndex& index, Mode mode);

  double at(OdId k, int route_pos, int train) const {
    return values[static_cast<size_t>(k)][static_cast<size_t>(route_pos)]
                 [static_cast<size_t>(train)];
  }
  double& at(OdId k, int route_pos, int train) {
    return values[static_cast<size_t>(k)][static_cast<size_t>(route_pos)]
                 [static_cast<size_t>(train)];
  }
  double od_total(OdId k) const;

  // Largest-remainder rounding per OD: preserves each OD total exactly,
  // assuming totals are integral. Ties go to the lower (train, route) key.
  AssignmentQ rounded(const ScheduleIndex& index) const;
};

// Options are ordered by train index first, then route position; direction
// finding and rounding tie-break in this order.
struct OptionRef {
  int route_pos = 0;
  int train = 0;
  friend bool operator<(const OptionRef& a, const OptionRef& b) {
    if (a.train != b.train) return a.train < b.train;
    return a.route_pos < b.route_pos;
  }
  friend bool operator==(const OptionRef& a, const OptionRef& b) {
    return a.train == b.train && a.route_pos == b.route_pos;
  }
};

}  // namespace transit
