#include <doctest.h>

#include "support.hpp"
#include "transit/benchmarks.hpp"
#include "transit/schedule.hpp"

using namespace transit;
using transit::testing::InstanceBuilder;

namespace {

// line legs [5,7], one train at 480: the departure-time fixture
TransitInstance two_leg_fixture(std::vector<Minutes> starts = {480}) {
  InstanceBuilder b;
  b.stations({1, 2, 3});
  b.line({1, 2, 3}, {5, 7}, std::move(starts), 100);
  b.od(1, 3, 1, {{{0, 1, 3}}});
  return b.build();
}

}  // namespace

TEST_CASE("departure time accumulates leg durations") {
  const TransitInstance instance = two_leg_fixture();
  const ScheduleIndex index(instance);
  CHECK(index.departure_time(0, 0, 0) == 480);
  CHECK(index.departure_time(0, 0, 1) == 485);
  CHECK(index.departure_time(0, 0, 2) == 492);
  CHECK(index.arrival_time(0, 0, 2) == 492);
  CHECK_THROWS_AS(index.departure_time(0, 0, 3), std::out_of_range);
}

TEST_CASE("next_connection picks first catchable departure") {
  // target-line departures at the shared station: 488, 495, 500
  InstanceBuilder b;
  b.stations({1, 2, 9});
  b.line({1, 2}, {10}, {480}, 100);
  b.line({2, 9}, {5}, {488, 495, 500}, 100);
  b.od(1, 9, 1, {{{0, 1, 2}, {1, 2, 9}}});
  const TransitInstance instance = b.build();
  const ScheduleIndex index(instance);

  CHECK(index.next_connection(2, 490, 1) == 1);   // departs 495
  CHECK(index.next_connection(2, 490, 1).value() == 1);
  CHECK(index.next_connection(2, 495, 1) == 1);   // same minute is catchable
  CHECK(index.next_connection(2, 502, 1) == std::nullopt);
  CHECK_THROWS_AS(index.next_connection(1, 490, 1), TopologyError);
}

TEST_CASE("next_connection is monotone in arrival time") {
  InstanceBuilder b;
  b.stations({1, 2, 9});
  b.line({1, 2}, {10}, {470, 480, 490}, 100);
  b.line({2, 9}, {5}, {475, 485, 495, 505}, 100);
  b.od(1, 9, 1, {{{0, 1, 2}, {1, 2, 9}}});
  const TransitInstance instance = b.build();
  const ScheduleIndex index(instance);
  int prev = -1;
  for (Minutes arr = 470; arr <= 505; ++arr) {
    const auto con = index.next_connection(2, arr, 1);
    if (!con) break;
    CHECK(*con >= prev);
    prev = *con;
  }
}

TEST_CASE("departure times increase along a line and across trains") {
  const TransitInstance instance = load_benchmark("hk-lite");
  const ScheduleIndex index(instance);
  for (const Line& line : instance.lines) {
    const int trains = instance.train_count(line.id);
    for (int t = 0; t < trains; ++t)
      for (size_t m = 0; m + 1 < line.stations.size(); ++m)
        CHECK(index.departure_time(line.id, t, static_cast<int>(m)) <
              index.departure_time(line.id, t, static_cast<int>(m) + 1));
    for (int t = 0; t + 1 < trains; ++t)
      CHECK(index.departure_time(line.id, t, 0) < index.departure_time(line.id, t + 1, 0));
  }
}

TEST_CASE("free-flow chains traverse segments in order and terminate") {
  const TransitInstance instance = load_benchmark("hk-lite");
  const ScheduleIndex index(instance);
  for (const Route& route : instance.routes) {
    const auto& segs = index.segments(route.id);
    for (int t = 0; t < index.option_train_count(route.id); ++t) {
      const OptionChain& chain = index.chain(route.id, t);
      if (!chain.valid) continue;
      Minutes when = index.departure_time(segs.front().line, t, segs.front().board_pos);
      for (size_t s = 0; s < segs.size(); ++s) {
        const int train = chain.train_per_segment[s];
        const Minutes dep = index.departure_time(segs[s].line, train, segs[s].board_pos);
        CHECK(dep >= when);  // never board before arriving
        when = index.arrival_time(segs[s].line, train, segs[s].alight_pos);
      }
      CHECK(when == chain.arrival_time);
    }
  }
}

TEST_CASE("validate accepts a well-formed instance") {
  for (const char* name : {"hk-lite", "toy-1line", "toy-2line"}) {
    const TransitInstance instance = load_benchmark(name);
    CHECK(validate_instance(instance).empty());
  }
}

TEST_CASE("validate names broken invariants") {
  TransitInstance instance = load_benchmark("toy-2line");
  SUBCASE("route discontinuity") {
    instance.routes[1].segments[1].board = 3;  // no longer chains at station 2
    bool found = false;
    for (const Violation& v : validate_instance(instance))
      if (v.rule == "route discontinuity") found = true;
    CHECK(found);
  }
  SUBCASE("nonpositive capacity") {
    instance.trains_by_line[0][0].capacity = 0;
    bool found = false;
    for (const Violation& v : validate_instance(instance))
      if (v.rule == "nonpositive capacity") found = true;
    CHECK(found);
  }
  SUBCASE("train order") {
    instance.trains_by_line[0][1].start_time = instance.trains_by_line[0][0].start_time;
    CHECK(!validate_instance(instance).empty());
  }
}

TEST_CASE("hk-lite matches its published shape") {
  const TransitInstance instance = load_benchmark("hk-lite");
  CHECK(instance.lines.size() == 5);
  CHECK(instance.total_demand() == 52717);
  CHECK(instance.od_pairs.size() == 12);
  long trains = 0;
  for (const auto& per_line : instance.trains_by_line) trains += static_cast<long>(per_line.size());
  CHECK(trains == 26 + 26 + 17 + 16 + 35);
  for (const auto& per_line : instance.trains_by_line)
    for (const Train& t : per_line) {
      CHECK(t.capacity == 2600);
      CHECK(t.start_time >= 350);
      CHECK(t.start_time <= 600);
    }
  // Sha Tin -> Central: 5663 passengers over two base routes
  const ODPair& sha_tin_central = instance.od_pairs[1];
  CHECK(sha_tin_central.demand == 5663);
  int base_routes = 0;
  for (RouteId r : sha_tin_central.routes)
    if (instance.route(r).group == "base") ++base_routes;
  CHECK(base_routes == 2);
  // every od keeps at least one valid option on every base route set
  const ScheduleIndex index(instance);
  for (const ODPair& od : instance.od_pairs) {
    int valid = 0;
    for (RouteId r : od.routes)
      for (int t = 0; t < index.option_train_count(r); ++t)
        if (index.chain(r, t).valid) ++valid;
    CHECK(valid > 0);
  }
}
