#include "transit/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "transit/exactso.hpp"

namespace transit {

TransitInstance apply_scenario(const TransitInstance& instance, const ScenarioSpec& spec) {
  if (spec.demand_scale <= 0 || spec.capacity_scale <= 0)
    throw std::invalid_argument("scenario scales must be positive");
  TransitInstance out = instance;
  if (!spec.label.empty()) out.name = instance.name + ":" + spec.label;

  // demand: floor then largest remainder against the scaled total
  const double factor = spec.demand_scale / 100.0;
  double scaled_total = 0;
  long floored_total = 0;
  std::vector<std::pair<double, OdId>> remainders;
  for (auto& od : out.od_pairs) {
    const double scaled = static_cast<double>(od.demand) * factor;
    scaled_total += scaled;
    od.demand = static_cast<long>(std::floor(scaled + 1e-9));
    floored_total += od.demand;
    remainders.push_back({scaled - static_cast<double>(od.demand), od.id});
  }
  long leftover = std::llround(scaled_total) - floored_total;
  std::stable_sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (const auto& [rem, k] : remainders) {
    if (leftover <= 0) break;
    out.od_pairs[static_cast<size_t>(k)].demand += 1;
    --leftover;
  }

  for (auto& trains : out.trains_by_line)
    for (auto& t : trains)
      t.capacity = static_cast<int>(std::floor(t.capacity * spec.capacity_scale / 100.0 + 1e-9));

  if (spec.enabled_routes) {
    const std::set<RouteId> keep(spec.enabled_routes->begin(), spec.enabled_routes->end());
    for (RouteId r : keep)
      if (r < 0 || r >= static_cast<RouteId>(instance.routes.size()))
        throw std::invalid_argument("enabled route does not exist: " + std::to_string(r));
    std::vector<Route> routes;
    std::vector<RouteId> remap(instance.routes.size(), -1);
    for (const Route& route : instance.routes) {
      if (!keep.count(route.id)) continue;
      Route copy = route;
      copy.id = static_cast<RouteId>(routes.size());
      remap[static_cast<size_t>(route.id)] = copy.id;
      routes.push_back(std::move(copy));
    }
    out.routes = std::move(routes);
    for (auto& od : out.od_pairs) {
      std::vector<RouteId> kept;
      for (RouteId r : od.routes)
        if (remap[static_cast<size_t>(r)] >= 0) kept.push_back(remap[static_cast<size_t>(r)]);
      if (kept.empty())
        throw std::invalid_argument("scenario leaves od " + std::to_string(od.id) +
                                    " without routes");
      od.routes = std::move(kept);
    }
  }
  return out;
}

std::vector<RouteId> routes_in_group(const TransitInstance& instance, const std::string& group) {
  std::vector<RouteId> out;
  for (const Route& r : instance.routes)
    if (r.group == group) out.push_back(r.id);
  return out;
}

double pscir(double ue_cost, double so_cost) {
  if (ue_cost <= 0) throw std::invalid_argument("pscir needs a positive UE cost");
  return 1.0 - so_cost / ue_cost;
}

std::vector<double> impacted_passengers(const AssignmentQ& q_ue, const AssignmentQ& q_so) {
  if (q_ue.values.size() != q_so.values.size())
    throw std::invalid_argument("assignments cover different OD sets");
  std::vector<double> out(q_ue.values.size(), 0.0);
  for (size_t k = 0; k < q_ue.values.size(); ++k) {
    const auto& a = q_ue.values[k];
    const auto& b = q_so.values[k];
    if (a.size() != b.size()) throw std::invalid_argument("assignments cover different options");
    double l1 = 0;
    for (size_t p = 0; p < a.size(); ++p) {
      if (a[p].size() != b[p].size())
        throw std::invalid_argument("assignments cover different options");
      for (size_t t = 0; t < a[p].size(); ++t) l1 += std::abs(a[p][t] - b[p][t]);
    }
    out[k] = l1 / 2.0;
  }
  return out;
}

std::vector<double> contribution_per_passenger(const std::vector<double>& cost_ue,
                                               const std::vector<double>& cost_so,
                                               const std::vector<double>& impacted) {
  std::vector<double> out(cost_ue.size(), 0.0);
  for (size_t k = 0; k < cost_ue.size(); ++k)
    out[k] = impacted[k] > 0 ? (cost_ue[k] - cost_so[k]) / impacted[k] : 0.0;
  return out;
}

ShiftHistogram shift_histogram(const ScheduleIndex& index, const AssignmentQ& q_ue,
                               const AssignmentQ& q_so) {
  const TransitInstance& instance = index.instance();
  ShiftHistogram out;

  for (const ODPair& od : instance.od_pairs) {
    const OdId k = od.id;
    // residual departures after removing the per-option overlap
    std::vector<std::pair<Minutes, double>> pool_ue, pool_so;
    for (size_t p = 0; p < od.routes.size(); ++p) {
      const auto& segs = index.segments(od.routes[p]);
      std::vector<std::pair<Minutes, double>> surplus_ue, surplus_so;
      const size_t trains = q_ue.values[static_cast<size_t>(k)][p].size();
      for (size_t t = 0; t < trains; ++t) {
        const double ue = q_ue.at(k, static_cast<int>(p), static_cast<int>(t));
        const double so = q_so.at(k, static_cast<int>(p), static_cast<int>(t));
        const double overlap = std::min(ue, so);
        out.unmoved += overlap;
        const Minutes dep =
            index.departure_time(segs.front().line, static_cast<int>(t), segs.front().board_pos);
        if (ue - overlap > 0) surplus_ue.push_back({dep, ue - overlap});
        if (so - overlap > 0) surplus_so.push_back({dep, so - overlap});
      }
      // monotone matching inside the route keeps FIFO order
      size_t i = 0, j = 0;
      while (i < surplus_ue.size() && j < surplus_so.size()) {
        const double m = std::min(surplus_ue[i].second, surplus_so[j].second);
        out.bins[surplus_so[j].first - surplus_ue[i].first] += m;
        surplus_ue[i].second -= m;
        surplus_so[j].second -= m;
        if (surplus_ue[i].second <= 1e-12) ++i;
        if (surplus_so[j].second <= 1e-12) ++j;
      }
      for (; i < surplus_ue.size(); ++i)
        if (surplus_ue[i].second > 1e-12) pool_ue.push_back(surplus_ue[i]);
      for (; j < surplus_so.size(); ++j)
        if (surplus_so[j].second > 1e-12) pool_so.push_back(surplus_so[j]);
    }
    // cross-route residual: sorted matching pairs nearest departure minutes
    std::sort(pool_ue.begin(), pool_ue.end());
    std::sort(pool_so.begin(), pool_so.end());
    size_t i = 0, j = 0;
    while (i < pool_ue.size() && j < pool_so.size()) {
      const double m = std::min(pool_ue[i].second, pool_so[j].second);
      out.bins[pool_so[j].first - pool_ue[i].first] += m;
      pool_ue[i].second -= m;
      pool_so[j].second -= m;
      if (pool_ue[i].second <= 1e-12) ++i;
      if (pool_so[j].second <= 1e-12) ++j;
    }
  }
  return out;
}

std::vector<LinkFlowPoint> link_flows(const ScheduleIndex& index, const FlowState& flow,
                                      LineId line, int leg_pos) {
  const TransitInstance& instance = index.instance();
  if (line < 0 || line >= static_cast<LineId>(instance.lines.size()))
    throw std::out_of_range("unknown line " + std::to_string(line));
  if (leg_pos < 0 ||
      leg_pos >= static_cast<int>(instance.lines[static_cast<size_t>(line)].leg_durations.size()))
    throw std::out_of_range("unknown leg " + std::to_string(leg_pos));
  std::vector<LinkFlowPoint> out;
  for (int t = 0; t < instance.train_count(line); ++t) {
    LinkFlowPoint point;
    point.train = t;
    point.departure = index.departure_time(line, t, leg_pos);
    point.passengers = flow.onboard(line, t, leg_pos);
    point.zero_flow = point.passengers == 0;
    out.push_back(point);
  }
  return out;
}

ComparisonReport compare_assignments(const ScheduleIndex& index, const Solution& ue,
                                     const Solution& so) {
  ComparisonReport report;
  report.ue_costs = ue.costs;
  report.so_costs = so.costs;
  report.ue_total = ue.costs.system_total;
  report.so_total = so.costs.system_total;
  report.improvement_ratio = pscir(report.ue_total, report.so_total);
  report.impacted = impacted_passengers(ue.q, so.q);
  std::vector<double> cost_ue, cost_so;
  for (const OdCost& c : ue.costs.per_od) cost_ue.push_back(c.total());
  for (const OdCost& c : so.costs.per_od) cost_so.push_back(c.total());
  report.contribution = contribution_per_passenger(cost_ue, cost_so, report.impacted);
  report.shifts = shift_histogram(index, ue.q, so.q);
  return report;
}

std::vector<MatrixCell> run_matrix(const TransitInstance& base,
                                   const std::vector<ScenarioSpec>& scenarios,
                                   const std::vector<std::string>& solvers,
                                   const std::string& backend, std::uint64_t seed) {
  const int n_cells = static_cast<int>(scenarios.size() * solvers.size());
  std::vector<MatrixCell> cells(static_cast<size_t>(n_cells));

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n_cells; ++i) {
    const size_t si = static_cast<size_t>(i) / solvers.size();
    const size_t vi = static_cast<size_t>(i) % solvers.size();
    MatrixCell& cell = cells[static_cast<size_t>(i)];
    if (scenarios[si].label.empty()) {
      char label[64];
      std::snprintf(label, sizeof(label), "d%g_c%g", scenarios[si].demand_scale,
                    scenarios[si].capacity_scale);
      cell.scenario = label;
    } else {
      cell.scenario = scenarios[si].label;
    }
    cell.solver = solvers[vi];
    try {
      const TransitInstance scoped = apply_scenario(base, scenarios[si]);
      const ScheduleIndex index(scoped);
      SolverConfig config;
      config.rng_seed = seed;
      if (cell.solver == "ue") {
        cell.total_cost = solve(index, Objective::kUserEquilibrium, config).costs.system_total;
      } else if (cell.solver == "approx-so") {
        cell.total_cost = solve(index, Objective::kApproxSystemOptimum, config).costs.system_total;
      } else if (cell.solver == "exact-so") {
        cell.total_cost = solve_exact(index, backend).solution.costs.system_total;
      } else {
        throw std::invalid_argument("unknown solver " + cell.solver);
      }
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
    }
  }

  for (size_t si = 0; si < scenarios.size(); ++si) {
    const MatrixCell* ue_cell = nullptr;
    for (size_t vi = 0; vi < solvers.size(); ++vi)
      if (solvers[vi] == "ue" && cells[si * solvers.size() + vi].ok)
        ue_cell = &cells[si * solvers.size() + vi];
    if (!ue_cell) continue;
    for (size_t vi = 0; vi < solvers.size(); ++vi) {
      MatrixCell& cell = cells[si * solvers.size() + vi];
      if (cell.ok && ue_cell->total_cost > 0)
        cell.improvement_ratio = pscir(ue_cell->total_cost, cell.total_cost);
    }
  }
  return cells;
}

std::string comparison_csv(const ScheduleIndex& index, const ComparisonReport& report) {
  std::string out = "od,cost_ue,cost_so,impacted,contribution_per_passenger\n";
  char buf[160];
  for (size_t k = 0; k < report.ue_costs.per_od.size(); ++k) {
    const ODPair& od = index.instance().od(static_cast<OdId>(k));
    std::snprintf(buf, sizeof(buf), "%d-%d,%.2f,%.2f,%.1f,%.2f\n", od.origin, od.destination,
                  report.ue_costs.per_od[k].total(), report.so_costs.per_od[k].total(),
                  report.impacted[k], report.contribution[k]);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "total,%.2f,%.2f,,\n", report.ue_total, report.so_total);
  out += buf;
  return out;
}

std::string shift_histogram_csv(const ShiftHistogram& histogram) {
  std::string out = "shift_minutes,passengers\n";
  char buf[64];
  std::map<int, double> rows = histogram.bins;
  rows[0] += histogram.unmoved;
  for (const auto& [shift, mass] : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.1f\n", shift, mass);
    out += buf;
  }
  return out;
}

std::string link_flows_csv(const ScheduleIndex& index, const FlowState& flow) {
  const TransitInstance& instance = index.instance();
  std::string out = "line,leg,from_station,to_station,train,departure_minute,passengers,zero_flow\n";
  char buf[128];
  for (const Line& line : instance.lines) {
    for (int leg = 0; leg < static_cast<int>(line.leg_durations.size()); ++leg) {
      for (const LinkFlowPoint& point : link_flows(index, flow, line.id, leg)) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%d,%d,%d,%d,%.1f,%d\n", line.id, leg,
                      line.stations[static_cast<size_t>(leg)],
                      line.stations[static_cast<size_t>(leg) + 1], point.train, point.departure,
                      point.passengers, point.zero_flow ? 1 : 0);
        out += buf;
      }
    }
  }
  return out;
}

std::string matrix_csv(const std::vector<MatrixCell>& cells) {
  std::string out = "scenario,solver,ok,total_cost,pscir,error\n";
  char buf[256];
  for (const MatrixCell& cell : cells) {
    std::string error = cell.error.substr(0, 80);
    for (char& c : error)
      if (c == ',' || c == '\n') c = ';';
    std::snprintf(buf, sizeof(buf), "%s,%s,%d,%.2f,%.4f,%s\n", cell.scenario.c_str(),
                  cell.solver.c_str(), cell.ok ? 1 : 0, cell.total_cost, cell.improvement_ratio,
                  error.c_str());
    out += buf;
  }
  return out;
}

}  // namespace transit
