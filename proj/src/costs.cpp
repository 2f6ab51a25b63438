#include "transit/costs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace transit {

namespace {

OdCost compute_od_cost(const ScheduleIndex& index, const FlowState& flow, OdId k) {
  const TransitInstance& instance = index.instance();
  const ODPair& od = instance.od(k);
  const CostParams& cp = instance.cost_params;
  const double alpha = cp.in_vehicle_per_min();
  const double beta = cp.wait_per_min();
  OdCost out;

  for (size_t p = 0; p < od.routes.size(); ++p) {
    const RouteId r = od.routes[p];
    const Route& route = instance.route(r);
    const auto& segs = index.segments(r);
    for (size_t s = 0; s < segs.size(); ++s) {
      const SegmentGeometry& geo = segs[s];
      const Line& line = instance.lines[static_cast<size_t>(geo.line)];
      const int trains = instance.train_count(geo.line);
      const int legs = geo.alight_pos - geo.board_pos;
      for (int t = 0; t < trains; ++t) {
        for (int leg = 0; leg < legs; ++leg) {
          const double v = flow.f(k, static_cast<int>(p), static_cast<int>(s), t, leg);
          if (v == 0) continue;
          out.ivcst +=
              alpha * v *
              line.leg_durations[static_cast<size_t>(geo.board_pos + leg)];
        }
        // denied-boarding wait: headway between consecutive start times
        if (t >= 1) {
          const double denied = flow.db(k, static_cast<int>(p), static_cast<int>(s), t);
          if (denied > 0) {
            const auto& line_trains = instance.trains(geo.line);
            const Minutes headway = line_trains[static_cast<size_t>(t)].start_time -
                                    line_trains[static_cast<size_t>(t - 1)].start_time;
            out.dbcst += beta * headway * denied;
          }
        }
      }
      if (s >= 1) {
        // transfer wait from the previous segment's arriving trains
        const SegmentGeometry& prev = segs[s - 1];
        const int prev_trains = instance.train_count(prev.line);
        const int prev_last_leg = prev.alight_pos - prev.board_pos - 1;
        const StationId at = route.segments[s].board;
        for (int t1 = 0; t1 < prev_trains; ++t1) {
          const double arriving =
              flow.f(k, static_cast<int>(p), static_cast<int>(s - 1), t1, prev_last_leg);
          if (arriving <= 0) continue;
          const Minutes arr = index.arrival_time(prev.line, t1, prev.alight_pos);
          const auto con = index.next_connection(at, arr, geo.line);
          if (!con)
            throw FeasibilityError("flow present at transfer with no onward train (od " +
                                   std::to_string(k) + ", route " + std::to_string(r) + ")");
          const Minutes dep = index.departure_time(geo.line, *con, geo.board_pos);
          out.chcst += beta * (dep - arr) * arriving;
        }
      }
    }
    // early/late penalty at the destination
    const SegmentGeometry& last = segs.back();
    const int last_leg = last.alight_pos - last.board_pos - 1;
    for (int t = 0; t < instance.train_count(last.line); ++t) {
      const double v = flow.f(k, static_cast<int>(p), static_cast<int>(segs.size()) - 1, t, last_leg);
      if (v <= 0) continue;
      const Minutes arr = index.arrival_time(last.line, t, last.alight_pos);
      out.elcst += v * (cp.early_per_min() * std::max(0, cp.target_arrival - arr) +
                        cp.late_per_min() * std::max(0, arr - cp.target_arrival));
    }
  }
  return out;
}

std::vector<double> component(const ScheduleIndex& index, const FlowState& flow,
                              double OdCost::*member) {
  const size_t n = index.instance().od_pairs.size();
  std::vector<double> out(n, 0.0);
  for (size_t k = 0; k < n; ++k)
    out[k] = compute_od_cost(index, flow, static_cast<OdId>(k)).*member;
  return out;
}

}  // namespace

std::vector<double> in_vehicle_cost(const ScheduleIndex& index, const FlowState& flow) {
  return component(index, flow, &OdCost::ivcst);
}
std::vector<double> transfer_wait_cost(const ScheduleIndex& index, const FlowState& flow) {
  return component(index, flow, &OdCost::chcst);
}
std::vector<double> denied_boarding_cost(const ScheduleIndex& index, const FlowState& flow) {
  return component(index, flow, &OdCost::dbcst);
}
std::vector<double> schedule_delay_cost(const ScheduleIndex& index, const FlowState& flow) {
  return component(index, flow, &OdCost::elcst);
}

CostBreakdown cost_breakdown(const ScheduleIndex& index, const FlowState& flow, Exec exec) {
  const int n = static_cast<int>(index.instance().od_pairs.size());
  CostBreakdown out;
  out.per_od.resize(static_cast<size_t>(n));
  if (exec == Exec::kParallel) {
    std::string error;  // exceptions must not escape the parallel region
#pragma omp parallel for schedule(static)
    for (int k = 0; k < n; ++k) {
      try {
        out.per_od[static_cast<size_t>(k)] = compute_od_cost(index, flow, k);
      } catch (const std::exception& e) {
#pragma omp critical
        error = e.what();
      }
    }
    if (!error.empty()) throw FeasibilityError(error);
  } else {
    for (int k = 0; k < n; ++k) out.per_od[static_cast<size_t>(k)] = compute_od_cost(index, flow, k);
  }
  for (const OdCost& c : out.per_od) out.system_total += c.total();
  return out;
}

std::string od_costs_csv(const ScheduleIndex& index, const CostBreakdown& costs) {
  std::string out = "od,ivcst,chcst,dbcst,elcst,total\n";
  char buf[160];
  for (size_t k = 0; k < costs.per_od.size(); ++k) {
    const ODPair& od = index.instance().od(static_cast<OdId>(k));
    const OdCost& c = costs.per_od[k];
    std::snprintf(buf, sizeof(buf), "%d-%d,%.2f,%.2f,%.2f,%.2f,%.2f\n", od.origin, od.destination,
                  c.ivcst, c.chcst, c.dbcst, c.elcst, c.total());
    out += buf;
  }
  char total_buf[64];
  std::snprintf(total_buf, sizeof(total_buf), "total,,,,,%.2f\n", costs.system_total);
  out += total_buf;
  return out;
}

}  // namespace transit
