#include "transit/benchmarks.hpp"

#include <stdexcept>

namespace transit {

namespace {

void add_line(TransitInstance& instance, const std::string& name,
              std::vector<StationId> stations, std::vector<Minutes> legs, int train_count,
              Minutes first_start, Minutes headway, int capacity) {
  Line line;
  line.id = static_cast<LineId>(instance.lines.size());
  line.name = name;
  line.stations = std::move(stations);
  line.leg_durations = std::move(legs);
  instance.lines.push_back(line);
  std::vector<Train> trains;
  for (int n = 0; n < train_count; ++n)
    trains.push_back({line.id, n, first_start + n * headway, capacity});
  instance.trains_by_line.push_back(std::move(trains));
}

OdId add_od(TransitInstance& instance, StationId origin, StationId destination, long demand) {
  ODPair od;
  od.id = static_cast<OdId>(instance.od_pairs.size());
  od.origin = origin;
  od.destination = destination;
  od.demand = demand;
  instance.od_pairs.push_back(od);
  return od.id;
}

void add_route(TransitInstance& instance, OdId k, std::vector<RouteSegment> segments,
               const std::string& group = "base") {
  Route route;
  route.id = static_cast<RouteId>(instance.routes.size());
  route.od = k;
  route.segments = std::move(segments);
  route.group = group;
  instance.od_pairs[static_cast<size_t>(k)].routes.push_back(route.id);
  instance.routes.push_back(std::move(route));
}

// Five directed lines over 15 stations, morning peak toward the CBD.
// Train counts 26/26/17/16/35 and per-train capacity 2600; 12 OD pairs
// totalling 52,717 passengers. Timetables are synthetic uniform headways
// over 5:50-10:00 AM (350..600 minutes).
TransitInstance make_hk_lite() {
  TransitInstance instance;
  instance.name = "hk-lite";
  const char* names[] = {"",          "Sha Tin",   "Cheung Sha Wan", "Choi Hung",
                         "Che Kung Temple", "Tai Wai",   "Kowloon Tong",   "Hung Hom",
                         "Admiralty", "Yau Ma Tei", "Mong Kok",      "Diamond Hill",
                         "Ho Man Tin", "Quarry Bay", "Central",       "Whampoa"};
  for (StationId s = 1; s <= 15; ++s) instance.stations.push_back({s, names[s]});

  const int cap = 2600;
  add_line(instance, "Line 1", {1, 5, 6, 7, 8}, {5, 4, 8, 6}, 26, 350, 10, cap);
  add_line(instance, "Line 2", {2, 10, 9, 8, 14}, {6, 3, 8, 2}, 26, 350, 10, cap);
  add_line(instance, "Line 3", {3, 11, 6, 10, 9, 12, 15}, {3, 7, 6, 3, 4, 4}, 17, 350, 15, cap);
  add_line(instance, "Line 4", {4, 5, 11, 12, 7}, {3, 10, 9, 4}, 16, 350, 16, cap);
  add_line(instance, "Line 5", {14, 8, 13}, {2, 12}, 35, 350, 7, cap);

  const LineId l1 = 0, l2 = 1, l3 = 2, l4 = 3, l5 = 4;

  // Demand matrix: origins 1-4, destinations 13-15.
  const OdId k1_13 = add_od(instance, 1, 13, 5356);
  const OdId k1_14 = add_od(instance, 1, 14, 5663);
  const OdId k1_15 = add_od(instance, 1, 15, 1892);
  const OdId k2_13 = add_od(instance, 2, 13, 6116);
  const OdId k2_14 = add_od(instance, 2, 14, 4073);
  const OdId k2_15 = add_od(instance, 2, 15, 2049);
  const OdId k3_13 = add_od(instance, 3, 13, 14967);
  const OdId k3_14 = add_od(instance, 3, 14, 5852);
  const OdId k3_15 = add_od(instance, 3, 15, 2525);
  const OdId k4_13 = add_od(instance, 4, 13, 1727);
  const OdId k4_14 = add_od(instance, 4, 14, 1848);
  const OdId k4_15 = add_od(instance, 4, 15, 649);

  // Base route set. Station strings name origin, transfers, destination.
  add_route(instance, k1_13, {{l1, 1, 8}, {l5, 8, 13}});                  // 1-8-13
  add_route(instance, k1_14, {{l1, 1, 8}, {l2, 8, 14}});                  // 1-8-14
  add_route(instance, k1_14, {{l1, 1, 6}, {l3, 6, 9}, {l2, 9, 14}});      // 1-6-9-14
  add_route(instance, k1_15, {{l1, 1, 6}, {l3, 6, 15}});                  // 1-6-15
  add_route(instance, k1_15, {{l1, 1, 5}, {l4, 5, 12}, {l3, 12, 15}});    // 1-5-12-15
  add_route(instance, k2_13, {{l2, 2, 8}, {l5, 8, 13}});                  // 2-8-13
  add_route(instance, k2_14, {{l2, 2, 14}});                              // 2-14
  add_route(instance, k2_15, {{l2, 2, 9}, {l3, 9, 15}});                  // 2-9-15
  add_route(instance, k3_13, {{l3, 3, 11}, {l4, 11, 7}, {l1, 7, 8}, {l5, 8, 13}});  // 3-11-7-8-13
  add_route(instance, k3_13, {{l3, 3, 9}, {l2, 9, 8}, {l5, 8, 13}});      // 3-9-8-13
  add_route(instance, k3_14, {{l3, 3, 9}, {l2, 9, 14}});                  // 3-9-14
  add_route(instance, k3_15, {{l3, 3, 15}});                              // 3-15
  add_route(instance, k4_13, {{l4, 4, 7}, {l1, 7, 8}, {l5, 8, 13}});      // 4-7-8-13
  add_route(instance, k4_13, {{l4, 4, 11}, {l3, 11, 9}, {l2, 9, 8}, {l5, 8, 13}});  // 4-11-9-8-13
  add_route(instance, k4_14, {{l4, 4, 11}, {l3, 11, 9}, {l2, 9, 14}});    // 4-11-9-14
  add_route(instance, k4_14, {{l4, 4, 7}, {l1, 7, 8}, {l2, 8, 14}});      // 4-7-8-14
  add_route(instance, k4_15, {{l4, 4, 12}, {l3, 12, 15}});                // 4-12-15
  add_route(instance, k4_15, {{l4, 4, 11}, {l3, 11, 15}});                // 4-11-15

  // Extended route set: additional itineraries enabled by scenario toggles.
  add_route(instance, k1_13, {{l1, 1, 6}, {l3, 6, 9}, {l2, 9, 8}, {l5, 8, 13}}, "extended");
  add_route(instance, k1_14, {{l1, 1, 5}, {l4, 5, 11}, {l3, 11, 9}, {l2, 9, 14}}, "extended");
  add_route(instance, k1_15, {{l1, 1, 5}, {l4, 5, 11}, {l3, 11, 15}}, "extended");
  add_route(instance, k2_13, {{l2, 2, 9}, {l3, 9, 12}, {l4, 12, 7}, {l1, 7, 8}, {l5, 8, 13}},
            "extended");
  add_route(instance, k2_15, {{l2, 2, 10}, {l3, 10, 15}}, "extended");
  add_route(instance, k3_13, {{l3, 3, 6}, {l1, 6, 8}, {l5, 8, 13}}, "extended");
  add_route(instance, k3_14, {{l3, 3, 6}, {l1, 6, 8}, {l2, 8, 14}}, "extended");
  add_route(instance, k3_14, {{l3, 3, 11}, {l4, 11, 7}, {l1, 7, 8}, {l2, 8, 14}}, "extended");
  add_route(instance, k4_13, {{l4, 4, 5}, {l1, 5, 8}, {l5, 8, 13}}, "extended");
  add_route(instance, k4_14, {{l4, 4, 5}, {l1, 5, 8}, {l2, 8, 14}}, "extended");
  add_route(instance, k4_15, {{l4, 4, 5}, {l1, 5, 6}, {l3, 6, 15}}, "extended");

  instance.cost_params = {6.0, 18.0, 5.0, 12.0, 540};
  return instance;
}

TransitInstance make_toy_1line() {
  TransitInstance instance;
  instance.name = "toy-1line";
  instance.stations = {{1, "A"}, {2, "B"}};
  add_line(instance, "AB", {1, 2}, {10}, 2, 524, 6, 2);  // arrivals 534 and 540
  const OdId k = add_od(instance, 1, 2, 3);
  add_route(instance, k, {{0, 1, 2}});
  // symmetric early/late penalties make the 2/1 and 1/2 splits equilibria
  instance.cost_params = {6.0, 18.0, 12.0, 12.0, 537};
  return instance;
}

TransitInstance make_toy_2line() {
  TransitInstance instance;
  instance.name = "toy-2line";
  instance.stations = {{1, "A"}, {2, "B"}, {3, "C"}, {4, "D"}};
  add_line(instance, "A-B-C", {1, 2, 3}, {5, 7}, 3, 510, 8, 3);
  add_line(instance, "B-D", {2, 4}, {6}, 3, 518, 8, 2);
  const OdId kAC = add_od(instance, 1, 3, 3);
  add_route(instance, kAC, {{0, 1, 3}});
  const OdId kAD = add_od(instance, 1, 4, 2);
  add_route(instance, kAD, {{0, 1, 2}, {1, 2, 4}});
  instance.cost_params = {6.0, 18.0, 6.0, 12.0, 540};
  return instance;
}

}  // namespace

TransitInstance load_benchmark(const std::string& name) {
  if (name == "hk-lite") return make_hk_lite();
  if (name == "toy-1line") return make_toy_1line();
  if (name == "toy-2line") return make_toy_2line();
  throw std::invalid_argument("unknown benchmark: " + name);
}

}  // namespace transit
