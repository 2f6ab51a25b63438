#pragma once

// Shared fixtures and generators for the test suites: ad-hoc instance
// construction plus seeded random tiny instances whose loads can never
// strand (each line's last train is a catch-all with room for everyone).

#include <random>
#include <vector>

#include "transit/assignment.hpp"
#include "transit/schedule.hpp"
#include "transit/types.hpp"

namespace transit::testing {

inline Line make_line(LineId id, std::vector<StationId> stations, std::vector<Minutes> legs,
                      std::string name = "") {
  Line line;
  line.id = id;
  line.name = std::move(name);
  line.stations = std::move(stations);
  line.leg_durations = std::move(legs);
  return line;
}

inline std::vector<Train> make_trains(LineId line, std::vector<Minutes> starts, int capacity) {
  std::vector<Train> out;
  for (size_t n = 0; n < starts.size(); ++n)
    out.push_back({line, static_cast<int>(n), starts[n], capacity});
  return out;
}

struct InstanceBuilder {
  TransitInstance instance;

  InstanceBuilder& stations(std::vector<StationId> ids) {
    for (StationId s : ids) instance.stations.push_back({s, "s" + std::to_string(s)});
    return *this;
  }
  InstanceBuilder& line(std::vector<StationId> stops, std::vector<Minutes> legs,
                        std::vector<Minutes> starts, int capacity) {
    const LineId id = static_cast<LineId>(instance.lines.size());
    instance.lines.push_back(make_line(id, std::move(stops), std::move(legs)));
    instance.trains_by_line.push_back(make_trains(id, std::move(starts), capacity));
    return *this;
  }
  InstanceBuilder& od(StationId origin, StationId destination, long demand,
                      std::vector<std::vector<RouteSegment>> route_segments) {
    ODPair od;
    od.id = static_cast<OdId>(instance.od_pairs.size());
    od.origin = origin;
    od.destination = destination;
    od.demand = demand;
    instance.od_pairs.push_back(od);
    for (auto& segs : route_segments) {
      Route route;
      route.id = static_cast<RouteId>(instance.routes.size());
      route.od = od.id;
      route.segments = std::move(segs);
      instance.od_pairs.back().routes.push_back(route.id);
      instance.routes.push_back(std::move(route));
    }
    return *this;
  }
  InstanceBuilder& costs(double iv, double wait, double early, double late, Minutes target) {
    instance.cost_params = {iv, wait, early, late, target};
    return *this;
  }
  TransitInstance build() {
    if (instance.cost_params.in_vehicle_per_hour == 0)
      instance.cost_params = {6.0, 18.0, 6.0, 12.0, 540};
    return instance;
  }
};

// Cent-integral hourly rates: every per-minute rate is a whole cent, so
// integer flows produce exact integer-cent costs.
inline double cent_rate(std::mt19937_64& rng, int lo_cents_per_min, int hi_cents_per_min) {
  std::vector<double> rates;
  for (int c = lo_cents_per_min; c <= hi_cents_per_min; c += 5) rates.push_back(c * 0.60);
  return rates[rng() % rates.size()];
}

// Tiny random instance: at most 2 lines, 4 stations and 3 trains per line,
// total demand <= 6. Last trains are roomy and depart late enough that no
// passenger can strand.
inline TransitInstance random_tiny_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&rng](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };

  InstanceBuilder builder;
  const int line0_stations = pick(2, 4);
  const bool two_lines = pick(0, 1) == 1;

  std::vector<StationId> stations0, all;
  for (int s = 1; s <= line0_stations; ++s) stations0.push_back(s);
  all = stations0;
  std::vector<Minutes> legs0;
  for (int e = 0; e + 1 < line0_stations; ++e) legs0.push_back(pick(2, 9));

  const int trains0 = pick(1, 3);
  std::vector<Minutes> starts0;
  Minutes when = 480 + pick(0, 20);
  for (int n = 0; n < trains0; ++n) {
    starts0.push_back(when);
    when += pick(3, 12);
  }
  const int cap0 = pick(1, 4);

  // optional second line branching from a station of line 0
  std::vector<StationId> stations1;
  std::vector<Minutes> legs1;
  std::vector<Minutes> starts1;
  int cap1 = 0;
  StationId transfer = 0;
  if (two_lines) {
    transfer = stations0[static_cast<size_t>(pick(1, line0_stations - 1))];
    stations1.push_back(transfer);
    const int extra = pick(1, 3);
    for (int s = 0; s < extra; ++s) {
      all.push_back(100 + s);
      stations1.push_back(100 + s);
    }
    for (size_t e = 0; e + 1 < stations1.size(); ++e) legs1.push_back(pick(2, 9));
    const int trains1 = pick(1, 3);
    // the last train departs after any possible line-0 arrival
    Minutes latest_arrival = starts0.back();
    for (Minutes d : legs0) latest_arrival += d;
    Minutes t = starts0.front() + pick(-5, 10);
    for (int n = 0; n + 1 < trains1; ++n) {
      starts1.push_back(t);
      t += pick(3, 12);
    }
    starts1.push_back(std::max(t, latest_arrival + pick(0, 5)));
    cap1 = pick(1, 4);
  }

  builder.stations(all);
  builder.line(stations0, legs0, starts0, cap0);
  if (two_lines) builder.line(stations1, legs1, starts1, cap1);

  // one or two OD pairs over the available topology
  const int n_ods = pick(1, 2);
  long budget = 6;
  for (int i = 0; i < n_ods && budget > 0; ++i) {
    const long demand = pick(1, static_cast<int>(std::min<long>(budget, 4)));
    budget -= demand;
    std::vector<std::vector<RouteSegment>> routes;
    if (two_lines && pick(0, 1) == 1) {
      const StationId dest = stations1.back();
      routes.push_back({{0, stations0.front(), transfer}, {1, transfer, dest}});
      builder.od(stations0.front(), dest, demand, std::move(routes));
    } else {
      const StationId origin = stations0.front();
      const StationId dest = stations0.back();
      routes.push_back({{0, origin, dest}});
      builder.od(origin, dest, demand, std::move(routes));
    }
  }

  builder.costs(cent_rate(rng, 5, 15), cent_rate(rng, 20, 35), cent_rate(rng, 5, 10),
                cent_rate(rng, 15, 25), 480 + pick(20, 60));
  TransitInstance instance = builder.build();

  // everyone can always catch the final departure
  for (auto& trains : instance.trains_by_line)
    if (!trains.empty()) trains.back().capacity = 10;
  instance.name = "tiny-" + std::to_string(seed);
  return instance;
}

// Random assignment over valid options, preserving each OD's demand.
inline AssignmentQ random_assignment(const ScheduleIndex& index, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  AssignmentQ q = AssignmentQ::zeros(index, AssignmentQ::Mode::kInteger);
  const TransitInstance& instance = index.instance();
  for (const ODPair& od : instance.od_pairs) {
    std::vector<OptionRef> valid;
    for (size_t p = 0; p < od.routes.size(); ++p)
      for (int t = 0; t < index.option_train_count(od.routes[p]); ++t)
        if (index.chain(od.routes[p], t).valid) valid.push_back({static_cast<int>(p), t});
    for (long unit = 0; unit < od.demand; ++unit) {
      const OptionRef ref = valid[rng() % valid.size()];
      q.at(od.id, ref.route_pos, ref.train) += 1.0;
    }
  }
  return q;
}

}  // namespace transit::testing
