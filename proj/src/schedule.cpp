#include "transit/schedule.hpp"

#include <algorithm>
#include <string>

namespace transit {

ScheduleIndex::ScheduleIndex(const TransitInstance& instance) : instance_(&instance) {
  for (const auto& s : instance.stations) max_station_id_ = std::max(max_station_id_, s.id);

  const size_t n_lines = instance.lines.size();
  position_.assign(n_lines, std::vector<int>(static_cast<size_t>(max_station_id_) + 1, -1));
  prefix_duration_.resize(n_lines);
  leg_id_offset_.resize(n_lines);
  for (size_t l = 0; l < n_lines; ++l) {
    const Line& line = instance.lines[l];
    prefix_duration_[l].resize(line.stations.size());
    Minutes acc = 0;
    for (size_t m = 0; m < line.stations.size(); ++m) {
      prefix_duration_[l][m] = acc;
      if (m + 1 < line.stations.size()) acc += line.leg_durations[m];
      const StationId s = line.stations[m];
      if (s >= 0 && s <= max_station_id_) position_[l][static_cast<size_t>(s)] = static_cast<int>(m);
    }
    leg_id_offset_[l] = total_legs_;
    total_legs_ += static_cast<int>(line.leg_durations.size());
  }

  const size_t n_routes = instance.routes.size();
  route_segments_.resize(n_routes);
  route_ride_time_.assign(n_routes, 0);
  boarding_points_.resize(n_routes);
  for (size_t r = 0; r < n_routes; ++r) {
    const Route& route = instance.routes[r];
    for (size_t i = 0; i < route.segments.size(); ++i) {
      const RouteSegment& seg = route.segments[i];
      SegmentGeometry geo;
      geo.line = seg.line;
      geo.board_pos = position_on_line(seg.line, seg.board);
      geo.alight_pos = position_on_line(seg.line, seg.alight);
      if (geo.board_pos < 0 || geo.alight_pos < 0 || geo.board_pos >= geo.alight_pos)
        throw TopologyError("route " + std::to_string(route.id) + " segment " +
                            std::to_string(i) + " does not fit its line");
      geo.ride_time = prefix_duration_[static_cast<size_t>(seg.line)][static_cast<size_t>(geo.alight_pos)] -
                      prefix_duration_[static_cast<size_t>(seg.line)][static_cast<size_t>(geo.board_pos)];
      route_ride_time_[r] += geo.ride_time;
      boarding_points_[r].push_back(
          {static_cast<int>(i), seg.line, geo.board_pos, seg.board});
      route_segments_[r].push_back(geo);
    }
  }

  // Free-flow chains: deterministic once schedules are fixed.
  chains_.resize(n_routes);
  for (size_t r = 0; r < n_routes; ++r) {
    const auto& segs = route_segments_[r];
    const int first_line_trains = instance.train_count(segs.front().line);
    chains_[r].resize(static_cast<size_t>(first_line_trains));
    for (int t = 0; t < first_line_trains; ++t) {
      OptionChain& chain = chains_[r][static_cast<size_t>(t)];
      chain.train_per_segment.assign(segs.size(), -1);
      int current = t;
      Minutes when = 0;
      bool ok = true;
      for (size_t i = 0; i < segs.size(); ++i) {
        const SegmentGeometry& geo = segs[i];
        if (i > 0) {
          const Minutes dep = departure_time(geo.line, current, geo.board_pos);
          chain.total_transfer_wait += dep - when;
        }
        chain.train_per_segment[i] = current;
        when = departure_time(geo.line, current, geo.alight_pos);
        if (i + 1 < segs.size()) {
          const SegmentGeometry& next = segs[i + 1];
          auto con = next_connection(instance.routes[r].segments[i].alight, when, next.line);
          if (!con) {
            ok = false;
            break;
          }
          current = *con;
        }
      }
      chain.valid = ok;
      chain.arrival_time = ok ? when : 0;
      if (!ok) {
        chain.train_per_segment.assign(segs.size(), -1);
        chain.total_transfer_wait = 0;
      }
    }
  }

  for (size_t l = 0; l < n_lines; ++l) {
    const Line& line = instance.lines[l];
    const auto& trains = instance.trains(static_cast<LineId>(l));
    for (size_t n = 0; n < trains.size(); ++n) {
      for (size_t m = 0; m < line.stations.size(); ++m) {
        const Minutes when = departure_time(static_cast<LineId>(l), static_cast<int>(n),
                                            static_cast<int>(m));
        if (m > 0)
          events_.push_back({when, ScheduleEvent::kArrival, static_cast<LineId>(l),
                             static_cast<int>(n), static_cast<int>(m)});
        if (m + 1 < line.stations.size())
          events_.push_back({when, ScheduleEvent::kDeparture, static_cast<LineId>(l),
                             static_cast<int>(n), static_cast<int>(m)});
      }
    }
  }
  std::sort(events_.begin(), events_.end(), [](const ScheduleEvent& a, const ScheduleEvent& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.line != b.line) return a.line < b.line;
    if (a.train != b.train) return a.train < b.train;
    return a.pos < b.pos;
  });
}

int ScheduleIndex::position_on_line(LineId line, StationId station) const {
  if (station < 0 || station > max_station_id_) return -1;
  return position_[static_cast<size_t>(line)][static_cast<size_t>(station)];
}

Minutes ScheduleIndex::departure_time(LineId line, int train, int pos) const {
  const auto& trains = instance_->trains(line);
  if (pos < 0 || pos >= static_cast<int>(prefix_duration_[static_cast<size_t>(line)].size()))
    throw std::out_of_range("station position " + std::to_string(pos) + " not on line " +
                            std::to_string(line));
  return trains.at(static_cast<size_t>(train)).start_time +
         prefix_duration_[static_cast<size_t>(line)][static_cast<size_t>(pos)];
}

std::optional<int> ScheduleIndex::next_connection(StationId station, Minutes arrival,
                                                  LineId target_line) const {
  const int pos = position_on_line(target_line, station);
  if (pos < 0)
    throw TopologyError("station " + std::to_string(station) + " not on line " +
                        std::to_string(target_line));
  const Minutes offset = prefix_duration_[static_cast<size_t>(target_line)][static_cast<size_t>(pos)];
  const auto& trains = instance_->trains(target_line);
  // Start times are strictly increasing, so departures at `pos` are too.
  const Minutes need = arrival - offset;
  auto it = std::lower_bound(trains.begin(), trains.end(), need,
                             [](const Train& tr, Minutes value) { return tr.start_time < value; });
  if (it == trains.end()) return std::nullopt;
  return static_cast<int>(it - trains.begin());
}

double ScheduleIndex::free_flow_cost(OdId k, int origin_train, RouteId r) const {
  const OptionChain& ch = chain(r, origin_train);
  if (!ch.valid)
    throw UnservableOptionError("option (train " + std::to_string(origin_train) + ", route " +
                                std::to_string(r) + ") has no connection chain");
  const CostParams& cp = instance_->cost_params;
  const Minutes ride = route_ride_time_[static_cast<size_t>(r)];
  const Minutes arr = ch.arrival_time;
  const Minutes early = std::max(0, cp.target_arrival - arr);
  const Minutes late = std::max(0, arr - cp.target_arrival);
  (void)k;
  return cp.in_vehicle_per_min() * ride + cp.wait_per_min() * ch.total_transfer_wait +
         cp.early_per_min() * early + cp.late_per_min() * late;
}

}  // namespace transit
