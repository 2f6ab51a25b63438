#include <doctest.h>

#include <sstream>

#include "support.hpp"
#include "transit/benchmarks.hpp"
#include "transit/loader.hpp"

using namespace transit;
using transit::testing::InstanceBuilder;
using transit::testing::random_assignment;
using transit::testing::random_tiny_instance;

TEST_CASE("board splits proportionally and fully when room suffices") {
  // groups {A:30, B:10}
  CHECK(board({30, 10}, 40, AssignmentQ::Mode::kInteger) == std::vector<double>{30, 10});
  CHECK(board({30, 10}, 20, AssignmentQ::Mode::kContinuous) == std::vector<double>{15, 5});
  // largest remainder: quotas 14.25 / 4.75
  CHECK(board({30, 10}, 19, AssignmentQ::Mode::kInteger) == std::vector<double>{14, 5});
  CHECK(board({}, 5, AssignmentQ::Mode::kInteger).empty());
  CHECK(board({3, 3}, 0, AssignmentQ::Mode::kInteger) == std::vector<double>{0, 0});
}

TEST_CASE("largest remainder matches exhaustive enumeration") {
  // verify the apportionment rule against direct search over integer splits
  for (int residual = 1; residual <= 12; ++residual) {
    const std::vector<double> waiting = {7, 5, 3};
    const std::vector<double> got = board(waiting, residual, AssignmentQ::Mode::kInteger);
    const double total = 15;
    if (residual >= total) continue;
    // enumerate all feasible integer boardings summing to residual
    double best_err = 1e18;
    std::vector<double> best;
    for (int a = 0; a <= 7; ++a)
      for (int b = 0; b <= 5; ++b)
        for (int c = 0; c <= 3; ++c) {
          if (a + b + c != residual) continue;
          double err = 0;
          const double quota_a = 7.0 * residual / total;
          const double quota_b = 5.0 * residual / total;
          const double quota_c = 3.0 * residual / total;
          err = std::abs(a - quota_a) + std::abs(b - quota_b) + std::abs(c - quota_c);
          if (err < best_err - 1e-12) {
            best_err = err;
            best = {double(a), double(b), double(c)};
          }
        }
    // largest-remainder minimizes total deviation from quotas
    double got_err = 0;
    const double quotas[3] = {7.0 * residual / total, 5.0 * residual / total,
                              3.0 * residual / total};
    for (int i = 0; i < 3; ++i) got_err += std::abs(got[static_cast<size_t>(i)] - quotas[i]);
    CHECK(got_err == doctest::Approx(best_err).epsilon(1e-9));
    double sum = 0;
    for (double v : got) sum += v;
    CHECK(sum == residual);
  }
}

TEST_CASE("single train loads everyone when capacity suffices") {
  InstanceBuilder b;
  b.stations({1, 2});
  b.line({1, 2}, {10}, {480}, 10);
  b.od(1, 2, 5, {{{0, 1, 2}}});
  const TransitInstance instance = b.build();
  const ScheduleIndex index(instance);
  AssignmentQ q = AssignmentQ::zeros(index, AssignmentQ::Mode::kInteger);
  q.at(0, 0, 0) = 5;
  const LoadResult result = load(index, q);
  REQUIRE(result.feasible);
  CHECK(result.flow.f(0, 0, 0, 0, 0) == 5);
  CHECK(result.flow.g(0, 0, 0, 0) == 5);
  CHECK(result.flow.db(0, 0, 0, 0) == 0);
  CHECK(check_feasibility(index, result.flow, q).empty());
}

TEST_CASE("hard capacity denies boarding onto the next train") {
  const TransitInstance instance = load_benchmark("toy-1line");
  const ScheduleIndex index(instance);
  AssignmentQ q = AssignmentQ::zeros(index, AssignmentQ::Mode::kInteger);
  q.at(0, 0, 0) = 3;  // all three arrive for train 1, capacity 2
  const LoadResult result = load(index, q);
  REQUIRE(result.feasible);
  CHECK(result.flow.f(0, 0, 0, 0, 0) == 2);
  CHECK(result.flow.f(0, 0, 0, 1, 0) == 1);
  CHECK(result.flow.db(0, 0, 0, 1) == 1);
  CHECK(result.flow.g(0, 0, 0, 0) == 3);
  CHECK(result.flow.g(0, 0, 0, 1) == 1);
  CHECK(check_feasibility(index, result.flow, q).empty());
}

TEST_CASE("missing the last train strands the run") {
  const TransitInstance instance = load_benchmark("toy-1line");
  const ScheduleIndex index(instance);
  AssignmentQ q = AssignmentQ::zeros(index, AssignmentQ::Mode::kInteger);
  q.at(0, 0, 1) = 3;  // three passengers for the last train, capacity 2
  const LoadResult result = load(index, q);
  CHECK(!result.feasible);
  REQUIRE(result.stranded.size() == 1);
  CHECK(result.stranded[0].count == 1);
  CHECK(result.stranded[0].station == 1);
}

TEST_CASE("transfers move passengers to the connecting train") {
  const TransitInstance instance = load_benchmark("toy-2line");
  const ScheduleIndex index(instance);
  AssignmentQ q = AssignmentQ::zeros(index, AssignmentQ::Mode::kInteger);
  q.at(0, 0, 0) = 3;  // A->C direct riders fill train 0
  q.at(1, 0, 1) = 2;  // A->D transfer riders take train 1
  const LoadResult result = load(index, q);
  REQUIRE(result.feasible);
  // transfer riders alight at B (arr 523) and catch line-1 train 1 (dep 526)
  CHECK(result.flow.f(1, 0, 0, 1, 0) == 2);
  CHECK(result.flow.f(1, 0, 1, 1, 0) == 2);
  CHECK(result.flow.g(1, 0, 1, 1) == 2);
  CHECK(check_feasibility(index, result.flow, q).empty());
}

TEST_CASE("check_feasibility flags hand-made violations") {
  const TransitInstance instance = load_benchmark("toy-1line");
  const ScheduleIndex index(instance);
  AssignmentQ q = AssignmentQ::zeros(index, AssignmentQ::Mode::kInteger);
  q.at(0, 0, 0) = 2;
  q.at(0, 0, 1) = 1;
  LoadResult result = load(index, q);
  REQUIRE(result.feasible);
  REQUIRE(check_feasibility(index, result.flow, q).empty());

  SUBCASE("capacity") {
    result.flow.f(0, 0, 0, 0, 0) = 9;  // over the 2-seat train
    bool found = false;
    for (const Violation& v : check_feasibility(index, result.flow, q))
      if (v.rule == "capacity") found = true;
    CHECK(found);
  }
  SUBCASE("conservation") {
    result.flow.f(0, 0, 0, 1, 0) = 0;  // arrivals no longer cover demand
    bool found = false;
    for (const Violation& v : check_feasibility(index, result.flow, q))
      if (v.rule == "conservation") found = true;
    CHECK(found);
  }
  SUBCASE("db-boundary") {
    result.flow.db(0, 0, 0, 0) = 1;  // nobody can be denied before the first train
    bool found = false;
    for (const Violation& v : check_feasibility(index, result.flow, q))
      if (v.rule == "db-boundary") found = true;
    CHECK(found);
  }
  SUBCASE("phantom-wait") {
    result.flow.g(0, 0, 0, 1) = 3;  // waiting with no matching source
    bool found = false;
    for (const Violation& v : check_feasibility(index, result.flow, q))
      if (v.rule == "phantom-wait") found = true;
    CHECK(found);
  }
}

TEST_CASE("loading is deterministic") {
  const TransitInstance instance = random_tiny_instance(42);
  const ScheduleIndex index(instance);
  const AssignmentQ q = random_assignment(index, 43);
  std::ostringstream trace_a, trace_b;
  LoadOptions options_a, options_b;
  options_a.event_trace = &trace_a;
  options_b.event_trace = &trace_b;
  const LoadResult a = load(index, q, options_a);
  const LoadResult b = load(index, q, options_b);
  CHECK(trace_a.str() == trace_b.str());
  CHECK(a.feasible == b.feasible);
  for (OdId k = 0; k < static_cast<OdId>(instance.od_pairs.size()); ++k)
    for (int p = 0; p < a.flow.route_count(k); ++p)
      for (int s = 0; s < static_cast<int>(index.segments(instance.od(k).routes[static_cast<size_t>(p)]).size()); ++s)
        for (int t = 0; t < a.flow.seg_trains(k, p, s); ++t)
          for (int e = 0; e < a.flow.seg_legs(k, p, s); ++e)
            CHECK(a.flow.f(k, p, s, t, e) == b.flow.f(k, p, s, t, e));
}

TEST_CASE("loader output always passes the invariant checks") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const TransitInstance instance = random_tiny_instance(seed);
    REQUIRE(validate_instance(instance).empty());
    const ScheduleIndex index(instance);
    const AssignmentQ q = random_assignment(index, seed + 1000);
    LoadOptions options;
    options.audit = true;
    const LoadResult result = load(index, q, options);
    REQUIRE(result.feasible);
    CHECK(result.audit_ok);
    CHECK(check_feasibility(index, result.flow, q).empty());
  }
}

TEST_CASE("infinite capacity reproduces the free-flow chains") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    TransitInstance instance = random_tiny_instance(seed);
    for (auto& trains : instance.trains_by_line)
      for (Train& t : trains) t.capacity = 1000000;
    const ScheduleIndex index(instance);
    const AssignmentQ q = random_assignment(index, seed + 7);
    const LoadResult result = load(index, q);
    REQUIRE(result.feasible);
    for (const ODPair& od : instance.od_pairs) {
      for (size_t p = 0; p < od.routes.size(); ++p) {
        const RouteId r = od.routes[p];
        const auto& segs = index.segments(r);
        for (int t = 0; t < index.option_train_count(r); ++t) {
          const double expected = q.at(od.id, static_cast<int>(p), t);
          if (expected == 0) continue;
          const OptionChain& chain = index.chain(r, t);
          // no denied boarding anywhere: flows sit exactly on the chain
          for (size_t s = 0; s < segs.size(); ++s)
            CHECK(result.flow.f(od.id, static_cast<int>(p), static_cast<int>(s),
                                chain.train_per_segment[s], 0) >= expected);
          for (int n = 0; n < index.option_train_count(r); ++n)
            CHECK(result.flow.db(od.id, static_cast<int>(p), 0, n) == 0);
        }
      }
    }
  }
}

TEST_CASE("raising capacities never increases denied boardings") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const TransitInstance narrow = random_tiny_instance(seed);
    TransitInstance wide = narrow;
    for (auto& trains : wide.trains_by_line)
      for (Train& t : trains) t.capacity += 2;
    const ScheduleIndex narrow_index(narrow);
    const ScheduleIndex wide_index(wide);
    const AssignmentQ q = random_assignment(narrow_index, seed + 555);
    const LoadResult a = load(narrow_index, q);
    const LoadResult b = load(wide_index, q);
    REQUIRE(a.feasible);
    REQUIRE(b.feasible);
    double total_a = 0, total_b = 0;
    for (const ODPair& od : narrow.od_pairs)
      for (size_t p = 0; p < od.routes.size(); ++p)
        for (size_t s = 0; s < narrow_index.segments(od.routes[p]).size(); ++s)
          for (int t = 0; t < a.flow.seg_trains(od.id, static_cast<int>(p), static_cast<int>(s)); ++t) {
            total_a += a.flow.db(od.id, static_cast<int>(p), static_cast<int>(s), t);
            total_b += b.flow.db(od.id, static_cast<int>(p), static_cast<int>(s), t);
          }
    CHECK(total_b <= total_a);
  }
}
