// Benchmark of the OpenMP kernels against their serial references on the
// hk-lite workload: cost breakdown, option-cost attribution, and a batch of
// independent network loadings (the line-search probe pattern).

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "transit/adafw.hpp"
#include "transit/benchmarks.hpp"
#include "transit/costs.hpp"
#include "transit/options.hpp"
#include "transit/scenario.hpp"

using namespace transit;

namespace {

double seconds(std::function<void()> fn, int repeats) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < repeats; ++i) fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() /
         repeats;
}

void report(const char* kernel, double serial, double parallel) {
  std::printf("%-24s serial %8.3f ms   parallel %8.3f ms   speedup %.2fx\n", kernel,
              serial * 1e3, parallel * 1e3, serial / parallel);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; parallel kernels run serially\n");
#endif

  const TransitInstance instance = load_benchmark("hk-lite");
  const ScheduleIndex index(instance);
  const AssignmentQ q = initial_assignment(index);
  const LoadResult loaded = load(index, q);
  if (!loaded.feasible) {
    std::printf("unexpected: benchmark assignment infeasible\n");
    return 1;
  }

  const int repeats = 200;
  report("cost_breakdown",
         seconds([&] { cost_breakdown(index, loaded.flow, Exec::kSerial); }, repeats),
         seconds([&] { cost_breakdown(index, loaded.flow, Exec::kParallel); }, repeats));

  report("attribute_costs",
         seconds([&] { attribute_costs(index, q, loaded.flow, Exec::kSerial); }, repeats),
         seconds([&] { attribute_costs(index, q, loaded.flow, Exec::kParallel); }, repeats));

  // batch of independent loads, the scenario-matrix / probe pattern
  const int batch = 16;
  const double serial_batch = seconds(
      [&] {
        for (int i = 0; i < batch; ++i) load(index, q);
      },
      8);
  const double parallel_batch = seconds(
      [&] {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < batch; ++i) load(index, q);
      },
      8);
  report("load x16", serial_batch, parallel_batch);

  // identical-bits check between the two policies
  const CostBreakdown a = cost_breakdown(index, loaded.flow, Exec::kSerial);
  const CostBreakdown b = cost_breakdown(index, loaded.flow, Exec::kParallel);
  std::printf("serial/parallel totals: %.10f / %.10f (%s)\n", a.system_total, b.system_total,
              a.system_total == b.system_total ? "identical" : "DIFFERENT");
  return a.system_total == b.system_total ? 0 : 1;
}
