#include <doctest.h>

#include "support.hpp"
#include "transit/benchmarks.hpp"
#include "transit/costs.hpp"

using namespace transit;
using transit::testing::InstanceBuilder;
using transit::testing::random_assignment;
using transit::testing::random_tiny_instance;

namespace {

template <typename Fn>
void for_each_flow_entry(const ScheduleIndex& index, FlowState& flow, Fn&& fn) {
  const TransitInstance& instance = index.instance();
  for (const ODPair& od : instance.od_pairs) {
    for (size_t p = 0; p < od.routes.size(); ++p) {
      const auto& segs = index.segments(od.routes[p]);
      for (size_t s = 0; s < segs.size(); ++s) {
        for (int t = 0; t < flow.seg_trains(od.id, static_cast<int>(p), static_cast<int>(s)); ++t) {
          for (int e = 0; e < flow.seg_legs(od.id, static_cast<int>(p), static_cast<int>(s)); ++e)
            fn(flow.f(od.id, static_cast<int>(p), static_cast<int>(s), t, e));
          fn(flow.g(od.id, static_cast<int>(p), static_cast<int>(s), t));
          fn(flow.db(od.id, static_cast<int>(p), static_cast<int>(s), t));
        }
      }
    }
  }
}

}  // namespace

TEST_CASE("in-vehicle cost is rate times load times duration") {
  InstanceBuilder b;
  b.stations({1, 2});
  b.line({1, 2}, {10}, {530}, 200);
  b.od(1, 2, 120, {{{0, 1, 2}}});
  b.costs(6, 18, 5, 12, 540);
  const TransitInstance instance = b.build();
  const ScheduleIndex index(instance);
  AssignmentQ q = AssignmentQ::zeros(index, AssignmentQ::Mode::kInteger);
  q.at(0, 0, 0) = 120;
  const LoadResult result = load(index, q);
  REQUIRE(result.feasible);
  CHECK(in_vehicle_cost(index, result.flow)[0] == doctest::Approx(120.0));

  // empty flow costs nothing
  const FlowState empty(index, AssignmentQ::Mode::kInteger);
  CHECK(in_vehicle_cost(index, empty)[0] == 0.0);
  CHECK(cost_breakdown(index, empty).system_total == 0.0);
}

TEST_CASE("in-vehicle cost sums over legs") {
  InstanceBuilder b;
  b.stations({1, 2, 3});
  b.line({1, 2, 3}, {5, 7}, {528}, 50);
  b.od(1, 3, 10, {{{0, 1, 3}}});
  b.costs(6, 18, 5, 12, 540);
  const TransitInstance instance = b.build();
  const ScheduleIndex index(instance);
  AssignmentQ q = AssignmentQ::zeros(index, AssignmentQ::Mode::kInteger);
  q.at(0, 0, 0) = 10;
  const LoadResult result = load(index, q);
  REQUIRE(result.feasible);
  // 10 passengers x 12 minutes x $0.10/min
  CHECK(in_vehicle_cost(index, result.flow)[0] == doctest::Approx(12.0));
}

TEST_CASE("transfer wait cost prices the connection gap") {
  InstanceBuilder b;
  b.stations({1, 2, 9});
  b.line({1, 2}, {12}, {480}, 100);   // arrives the transfer at 492
  b.line({2, 9}, {5}, {500}, 100);    // departs it at 500
  b.od(1, 9, 50, {{{0, 1, 2}, {1, 2, 9}}});
  b.costs(6, 18, 5, 12, 505);
  const TransitInstance instance = b.build();
  const ScheduleIndex index(instance);
  AssignmentQ q = AssignmentQ::zeros(index, AssignmentQ::Mode::kInteger);
  q.at(0, 0, 0) = 50;
  const LoadResult result = load(index, q);
  REQUIRE(result.feasible);
  CHECK(transfer_wait_cost(index, result.flow)[0] == doctest::Approx(120.0));  // 50*8*0.3
}

TEST_CASE("zero-wait transfers and transfer-free routes cost nothing") {
  InstanceBuilder b;
  b.stations({1, 2, 9});
  b.line({1, 2}, {12}, {480}, 100);
  b.line({2, 9}, {5}, {492}, 100);  // same-minute connection
  b.od(1, 9, 50, {{{0, 1, 2}, {1, 2, 9}}});
  b.od(1, 2, 5, {{{0, 1, 2}}});
  b.costs(6, 18, 5, 12, 497);
  const TransitInstance instance = b.build();
  const ScheduleIndex index(instance);
  AssignmentQ q = AssignmentQ::zeros(index, AssignmentQ::Mode::kInteger);
  q.at(0, 0, 0) = 50;
  q.at(1, 0, 0) = 5;
  const LoadResult result = load(index, q);
  REQUIRE(result.feasible);
  const std::vector<double> ch = transfer_wait_cost(index, result.flow);
  CHECK(ch[0] == 0.0);
  CHECK(ch[1] == 0.0);
}

TEST_CASE("denied boarding is priced at the start-time headway") {
  InstanceBuilder b;
  b.stations({1, 2});
  b.line({1, 2}, {8}, {500, 506}, 10);
  b.od(1, 2, 20, {{{0, 1, 2}}});
  b.costs(6, 18, 5, 12, 514);
  TransitInstance instance = b.build();
  instance.trains_by_line[0][1].capacity = 50;  // everyone fits eventually
  const ScheduleIndex index(instance);
  AssignmentQ q = AssignmentQ::zeros(index, AssignmentQ::Mode::kInteger);
  q.at(0, 0, 0) = 20;
  const LoadResult result = load(index, q);
  REQUIRE(result.feasible);
  CHECK(result.flow.db(0, 0, 0, 1) == 10);
  CHECK(denied_boarding_cost(index, result.flow)[0] == doctest::Approx(18.0));  // 10*6*0.3
  // a state with no denials costs nothing
  const FlowState empty(index, AssignmentQ::Mode::kInteger);
  CHECK(denied_boarding_cost(index, empty)[0] == 0.0);
}

TEST_CASE("denied boarding sums across stations") {
  // hand-built state: 5 denied at the origin and 5 at the transfer, headway 4
  InstanceBuilder b;
  b.stations({1, 2, 3});
  b.line({1, 2}, {5}, {500, 504}, 100);
  b.line({2, 3}, {5}, {506, 510}, 100);
  b.od(1, 3, 10, {{{0, 1, 2}, {1, 2, 3}}});
  b.costs(6, 18, 5, 12, 515);
  const TransitInstance instance = b.build();
  const ScheduleIndex index(instance);
  FlowState flow(index, AssignmentQ::Mode::kInteger);
  flow.db(0, 0, 0, 1) = 5;  // origin, second train of line 0
  flow.db(0, 0, 1, 1) = 5;  // transfer, second train of line 1
  CHECK(denied_boarding_cost(index, flow)[0] == doctest::Approx(12.0));  // (5+5)*4*0.3
}

TEST_CASE("schedule delay prices early and late arrivals") {
  InstanceBuilder b;
  b.stations({1, 2});
  b.line({1, 2}, {10}, {520, 530, 542}, 100);  // arrivals 530, 540, 552
  b.od(1, 2, 40, {{{0, 1, 2}}});
  b.costs(6, 18, 5, 12, 540);
  const TransitInstance instance = b.build();
  const ScheduleIndex index(instance);

  AssignmentQ q = AssignmentQ::zeros(index, AssignmentQ::Mode::kInteger);
  SUBCASE("late") {
    q.at(0, 0, 2) = 40;  // arrive 552: 40*12*0.2
    CHECK(schedule_delay_cost(index, load(index, q).flow)[0] == doctest::Approx(96.0));
  }
  SUBCASE("early") {
    q.at(0, 0, 0) = 40;  // arrive 530: 40*10*(5/60)
    CHECK(schedule_delay_cost(index, load(index, q).flow)[0] ==
          doctest::Approx(40 * 10 * 5.0 / 60.0));
  }
  SUBCASE("on time") {
    q.at(0, 0, 1) = 40;
    CHECK(schedule_delay_cost(index, load(index, q).flow)[0] == 0.0);
  }
}

TEST_CASE("breakdown components add up exactly") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TransitInstance instance = random_tiny_instance(seed);
    const ScheduleIndex index(instance);
    const AssignmentQ q = random_assignment(index, seed + 11);
    const LoadResult result = load(index, q);
    REQUIRE(result.feasible);
    const CostBreakdown costs = cost_breakdown(index, result.flow);
    const std::vector<double> iv = in_vehicle_cost(index, result.flow);
    const std::vector<double> ch = transfer_wait_cost(index, result.flow);
    const std::vector<double> db = denied_boarding_cost(index, result.flow);
    const std::vector<double> el = schedule_delay_cost(index, result.flow);
    double total = 0;
    for (size_t k = 0; k < costs.per_od.size(); ++k) {
      CHECK(costs.per_od[k].ivcst == iv[k]);
      CHECK(costs.per_od[k].chcst == ch[k]);
      CHECK(costs.per_od[k].dbcst == db[k]);
      CHECK(costs.per_od[k].elcst == el[k]);
      CHECK(costs.per_od[k].total() ==
            costs.per_od[k].ivcst + costs.per_od[k].chcst + costs.per_od[k].dbcst +
                costs.per_od[k].elcst);
      CHECK(costs.per_od[k].total() >= 0);
      total += costs.per_od[k].total();
    }
    CHECK(costs.system_total == doctest::Approx(total).epsilon(1e-12));
  }
}

TEST_CASE("costs are linear and scale with flows") {
  const TransitInstance instance = random_tiny_instance(3);
  const ScheduleIndex index(instance);
  const AssignmentQ q = random_assignment(index, 5);
  LoadResult result = load(index, q);
  REQUIRE(result.feasible);

  FlowState doubled = result.flow;
  for_each_flow_entry(index, doubled, [](double& v) { v *= 2.0; });
  const CostBreakdown base = cost_breakdown(index, result.flow);
  const CostBreakdown twice = cost_breakdown(index, doubled);
  CHECK(twice.system_total == doctest::Approx(2.0 * base.system_total).epsilon(1e-12));

  // sum of two disjoint runs costs the sum of the runs
  const AssignmentQ q2 = random_assignment(index, 6);
  const LoadResult second = load(index, q2);
  REQUIRE(second.feasible);
  FlowState merged = result.flow;
  {
    // add the second state entrywise
    std::vector<double*> slots;
    for_each_flow_entry(index, merged, [&slots](double& v) { slots.push_back(&v); });
    std::vector<double> other;
    FlowState tmp = second.flow;
    for_each_flow_entry(index, tmp, [&other](double& v) { other.push_back(v); });
    for (size_t i = 0; i < slots.size(); ++i) *slots[i] += other[i];
  }
  const CostBreakdown sum = cost_breakdown(index, merged);
  const CostBreakdown b2 = cost_breakdown(index, second.flow);
  CHECK(sum.system_total ==
        doctest::Approx(base.system_total + b2.system_total).epsilon(1e-9));
}

TEST_CASE("serial and parallel breakdowns produce identical bits") {
  const TransitInstance instance = load_benchmark("hk-lite");
  const ScheduleIndex index(instance);
  AssignmentQ q = AssignmentQ::zeros(index, AssignmentQ::Mode::kInteger);
  for (const ODPair& od : instance.od_pairs) {
    // spread demand over the first valid option of each route
    const size_t routes = od.routes.size();
    for (size_t p = 0; p < routes; ++p) {
      for (int t = 0; t < index.option_train_count(od.routes[p]); ++t) {
        if (!index.chain(od.routes[p], t).valid) continue;
        q.at(od.id, static_cast<int>(p), t) =
            static_cast<double>(od.demand / static_cast<long>(routes) +
                                (p == 0 ? od.demand % static_cast<long>(routes) : 0));
        break;
      }
    }
  }
  const LoadResult result = load(index, q);
  REQUIRE(result.feasible);
  const CostBreakdown serial = cost_breakdown(index, result.flow, Exec::kSerial);
  const CostBreakdown parallel = cost_breakdown(index, result.flow, Exec::kParallel);
  REQUIRE(serial.per_od.size() == parallel.per_od.size());
  for (size_t k = 0; k < serial.per_od.size(); ++k) {
    CHECK(serial.per_od[k].ivcst == parallel.per_od[k].ivcst);
    CHECK(serial.per_od[k].chcst == parallel.per_od[k].chcst);
    CHECK(serial.per_od[k].dbcst == parallel.per_od[k].dbcst);
    CHECK(serial.per_od[k].elcst == parallel.per_od[k].elcst);
  }
  CHECK(serial.system_total == parallel.system_total);
}

TEST_CASE("od cost report rounds to cents") {
  const TransitInstance instance = load_benchmark("toy-1line");
  const ScheduleIndex index(instance);
  AssignmentQ q = AssignmentQ::zeros(index, AssignmentQ::Mode::kInteger);
  q.at(0, 0, 0) = 2;
  q.at(0, 0, 1) = 1;
  const CostBreakdown costs = cost_breakdown(index, load(index, q).flow);
  const std::string csv = od_costs_csv(index, costs);
  CHECK(csv.find("od,ivcst,chcst,dbcst,elcst,total") == 0);
  CHECK(csv.find("1-2,") != std::string::npos);
}
