#include <algorithm>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "transit/types.hpp"

namespace transit {

namespace {

std::string line_label(LineId l) { return "line " + std::to_string(l); }
std::string route_label(RouteId r) { return "route " + std::to_string(r); }
std::string od_label(OdId k) { return "od " + std::to_string(k); }

}  // namespace

std::vector<Violation> validate_instance(const TransitInstance& instance) {
  std::vector<Violation> out;
  auto add = [&out](std::string entity, std::string rule, std::string detail) {
    out.push_back({std::move(entity), std::move(rule), std::move(detail)});
  };

  std::unordered_set<StationId> station_ids;
  for (const auto& s : instance.stations) {
    if (!station_ids.insert(s.id).second)
      add("station " + std::to_string(s.id), "duplicate station id", s.name);
  }

  // line -> station -> position, for route checks below.
  std::vector<std::unordered_map<StationId, int>> pos_on(instance.lines.size());
  for (size_t l = 0; l < instance.lines.size(); ++l) {
    const Line& line = instance.lines[l];
    if (line.stations.size() < 2) add(line_label(line.id), "line too short", "");
    if (line.leg_durations.size() + 1 != line.stations.size())
      add(line_label(line.id), "leg count mismatch", "");
    for (Minutes d : line.leg_durations)
      if (d <= 0) add(line_label(line.id), "nonpositive leg duration", std::to_string(d));
    for (size_t m = 0; m < line.stations.size(); ++m) {
      const StationId s = line.stations[m];
      if (!station_ids.count(s))
        add(line_label(line.id), "unknown station", std::to_string(s));
      if (!pos_on[l].emplace(s, static_cast<int>(m)).second)
        add(line_label(line.id), "repeated station on line", std::to_string(s));
    }
  }

  if (instance.trains_by_line.size() != instance.lines.size())
    add("instance", "trains_by_line size mismatch", "");
  for (size_t l = 0; l < std::min(instance.trains_by_line.size(), instance.lines.size()); ++l) {
    const auto& trains = instance.trains_by_line[l];
    Minutes prev = -1;
    for (size_t n = 0; n < trains.size(); ++n) {
      const Train& t = trains[n];
      if (t.capacity <= 0)
        add(line_label(static_cast<LineId>(l)) + " train " + std::to_string(n),
            "nonpositive capacity", std::to_string(t.capacity));
      if (n > 0 && t.start_time <= prev)
        add(line_label(static_cast<LineId>(l)) + " train " + std::to_string(n),
            "start times not strictly increasing", std::to_string(t.start_time));
      prev = t.start_time;
    }
  }

  for (const Route& route : instance.routes) {
    if (route.segments.empty()) {
      add(route_label(route.id), "empty route", "");
      continue;
    }
    if (route.od < 0 || route.od >= static_cast<OdId>(instance.od_pairs.size())) {
      add(route_label(route.id), "unknown od", std::to_string(route.od));
      continue;
    }
    const ODPair& od = instance.od_pairs[static_cast<size_t>(route.od)];
    if (route.segments.front().board != od.origin)
      add(route_label(route.id), "route does not start at origin", "");
    if (route.segments.back().alight != od.destination)
      add(route_label(route.id), "route does not end at destination", "");
    std::set<StationId> visited;
    for (size_t i = 0; i < route.segments.size(); ++i) {
      const RouteSegment& seg = route.segments[i];
      if (seg.line < 0 || seg.line >= static_cast<LineId>(instance.lines.size())) {
        add(route_label(route.id), "unknown line", std::to_string(seg.line));
        continue;
      }
      const auto& pos = pos_on[static_cast<size_t>(seg.line)];
      auto b = pos.find(seg.board);
      auto a = pos.find(seg.alight);
      if (b == pos.end() || a == pos.end() || b->second >= a->second)
        add(route_label(route.id), "segment not in line order",
            std::to_string(seg.board) + "->" + std::to_string(seg.alight));
      if (i > 0) {
        const RouteSegment& prev_seg = route.segments[i - 1];
        if (prev_seg.alight != seg.board)
          add(route_label(route.id), "route discontinuity",
              "segment " + std::to_string(i) + " boards at " + std::to_string(seg.board) +
                  " but previous alights at " + std::to_string(prev_seg.alight));
        // The transfer station must lie on both lines.
        else if (!pos.count(prev_seg.alight))
          add(route_label(route.id), "transfer station not shared",
              std::to_string(prev_seg.alight));
      }
      if (!visited.insert(seg.board).second)
        add(route_label(route.id), "route cycles", std::to_string(seg.board));
      if (static_cast<size_t>(seg.line) < instance.trains_by_line.size() &&
          instance.trains_by_line[static_cast<size_t>(seg.line)].empty())
        add(route_label(route.id), "segment line has no trains", std::to_string(seg.line));
    }
    if (!route.segments.empty() && !visited.insert(route.segments.back().alight).second)
      add(route_label(route.id), "route cycles", std::to_string(route.segments.back().alight));
  }

  for (const ODPair& od : instance.od_pairs) {
    if (od.origin == od.destination)
      add(od_label(od.id), "origin equals destination", std::to_string(od.origin));
    if (od.demand < 0) add(od_label(od.id), "negative demand", std::to_string(od.demand));
    if (od.routes.empty()) add(od_label(od.id), "no routes", "");
    for (RouteId r : od.routes) {
      if (r < 0 || r >= static_cast<RouteId>(instance.routes.size()))
        add(od_label(od.id), "unknown route", std::to_string(r));
      else if (instance.routes[static_cast<size_t>(r)].od != od.id)
        add(od_label(od.id), "route belongs to another od", std::to_string(r));
    }
  }

  return out;
}

}  // namespace transit
