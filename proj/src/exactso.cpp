#include "transit/exactso.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "transit/costs.hpp"
#include "transit/instance_io.hpp"

#ifndef TRANSIT_SO_DEFAULT_BACKEND_DIR
#define TRANSIT_SO_DEFAULT_BACKEND_DIR ""
#endif

namespace transit {

namespace {

std::string q_name(OdId k, int t, RouteId r) {
  return "q_" + std::to_string(k) + "_" + std::to_string(t) + "_" + std::to_string(r);
}
std::string f_name(OdId k, RouteId r, int t, int leg_global) {
  return "f_" + std::to_string(k) + "_" + std::to_string(r) + "_" + std::to_string(t) + "_" +
         std::to_string(leg_global);
}

}  // namespace

ModelIR build_ilp(const ScheduleIndex& index) {
  const TransitInstance& instance = index.instance();
  ModelIR model;
  model.name = instance.name.empty() ? "transit_so" : instance.name;
  const CostParams& cp = instance.cost_params;

  // Objective coefficients accumulate per variable.
  std::vector<double> obj_coef;
  auto grow = [&obj_coef](int var) {
    if (var >= static_cast<int>(obj_coef.size())) obj_coef.resize(static_cast<size_t>(var) + 1, 0.0);
  };

  // capacity rows: terms collected per (line, train, leg)
  std::vector<std::vector<std::vector<LinearTerm>>> cap_terms(instance.lines.size());
  for (size_t l = 0; l < instance.lines.size(); ++l) {
    cap_terms[l].resize(static_cast<size_t>(instance.train_count(static_cast<LineId>(l))) *
                        instance.lines[l].leg_durations.size());
  }

  for (const ODPair& od : instance.od_pairs) {
    const OdId k = od.id;
    LinearConstraint demand_row;
    demand_row.name = "demand_" + std::to_string(k);
    demand_row.rel = Relation::kEq;
    demand_row.rhs = static_cast<double>(od.demand);
    LinearConstraint arrival_row;
    arrival_row.name = "arrive_" + std::to_string(k);
    arrival_row.rel = Relation::kEq;
    arrival_row.rhs = static_cast<double>(od.demand);

    for (size_t p = 0; p < od.routes.size(); ++p) {
      const RouteId r = od.routes[p];
      const Route& route = instance.route(r);
      const auto& segs = index.segments(r);
      const int first_trains = index.option_train_count(r);

      // Reached trains per segment, and flow sources per reached train.
      // sources[s][t2] lists last-leg f vars of segment s-1 connecting to t2.
      std::vector<std::vector<char>> reached(segs.size());
      for (size_t s = 0; s < segs.size(); ++s)
        reached[s].assign(static_cast<size_t>(instance.train_count(segs[s].line)), 0);
      for (int t = 0; t < first_trains; ++t) {
        const OptionChain& chain = index.chain(r, t);
        if (!chain.valid) continue;
        for (size_t s = 0; s < segs.size(); ++s)
          reached[s][static_cast<size_t>(chain.train_per_segment[s])] = 1;
      }

      // q variables and the boarding equality on the first segment.
      std::vector<int> q_var(static_cast<size_t>(first_trains), -1);
      for (int t = 0; t < first_trains; ++t) {
        if (!index.chain(r, t).valid) continue;
        q_var[static_cast<size_t>(t)] =
            model.add_var(q_name(k, t, r), 0, static_cast<double>(od.demand), true);
        demand_row.terms.push_back({q_var[static_cast<size_t>(t)], 1.0});
      }

      // f variables per (segment, reached train, leg), with continuity and
      // per-leg objective and capacity contributions.
      std::vector<std::vector<int>> f_first(segs.size());   // first-leg var per train
      std::vector<std::vector<int>> f_last(segs.size());    // last-leg var per train
      for (size_t s = 0; s < segs.size(); ++s) {
        const SegmentGeometry& geo = segs[s];
        const Line& line = instance.lines[static_cast<size_t>(geo.line)];
        const int trains = instance.train_count(geo.line);
        f_first[s].assign(static_cast<size_t>(trains), -1);
        f_last[s].assign(static_cast<size_t>(trains), -1);
        for (int t = 0; t < trains; ++t) {
          if (!reached[s][static_cast<size_t>(t)]) continue;
          const int cap = instance.trains(geo.line)[static_cast<size_t>(t)].capacity;
          int prev_var = -1;
          for (int pos = geo.board_pos; pos < geo.alight_pos; ++pos) {
            const int leg_global = index.leg_id(geo.line, pos);
            const int v = model.add_var(f_name(k, r, t, leg_global), 0, cap, true);
            grow(v);
            obj_coef[static_cast<size_t>(v)] +=
                cp.in_vehicle_per_min() * line.leg_durations[static_cast<size_t>(pos)];
            cap_terms[static_cast<size_t>(geo.line)]
                     [static_cast<size_t>(t) * line.leg_durations.size() +
                      static_cast<size_t>(pos)]
                         .push_back({v, 1.0});
            if (pos == geo.board_pos) f_first[s][static_cast<size_t>(t)] = v;
            if (pos == geo.alight_pos - 1) f_last[s][static_cast<size_t>(t)] = v;
            if (prev_var >= 0) {
              LinearConstraint through;
              through.name = "through_" + std::to_string(k) + "_" + std::to_string(r) + "_" +
                             std::to_string(t) + "_" + std::to_string(leg_global);
              through.rel = Relation::kEq;
              through.rhs = 0;
              through.terms = {{v, 1.0}, {prev_var, -1.0}};
              model.constraints.push_back(std::move(through));
            }
            prev_var = v;
          }
        }
      }

      // First-segment boarding: f = q on the departure leg.
      for (int t = 0; t < first_trains; ++t) {
        if (q_var[static_cast<size_t>(t)] < 0) continue;
        LinearConstraint boarding;
        boarding.name = "board_" + std::to_string(k) + "_" + std::to_string(r) + "_" +
                        std::to_string(t);
        boarding.rel = Relation::kEq;
        boarding.rhs = 0;
        boarding.terms = {{f_first[0][static_cast<size_t>(t)], 1.0},
                          {q_var[static_cast<size_t>(t)], -1.0}};
        model.constraints.push_back(std::move(boarding));
      }

      // Transfer equalities: arrivals on t1 board the connected train t2.
      for (size_t s = 1; s < segs.size(); ++s) {
        const SegmentGeometry& prev = segs[s - 1];
        const SegmentGeometry& geo = segs[s];
        const int prev_trains = instance.train_count(prev.line);
        std::vector<std::vector<LinearTerm>> sources(
            static_cast<size_t>(instance.train_count(geo.line)));
        for (int t1 = 0; t1 < prev_trains; ++t1) {
          if (f_last[s - 1][static_cast<size_t>(t1)] < 0) continue;
          const Minutes arr = index.arrival_time(prev.line, t1, prev.alight_pos);
          const auto con = index.next_connection(route.segments[s].board, arr, geo.line);
          if (!con) continue;  // unreachable for valid chains
          const Minutes dep = index.departure_time(geo.line, *con, geo.board_pos);
          const int src = f_last[s - 1][static_cast<size_t>(t1)];
          grow(src);
          obj_coef[static_cast<size_t>(src)] += cp.wait_per_min() * (dep - arr);
          sources[static_cast<size_t>(*con)].push_back({src, 1.0});
        }
        for (int t2 = 0; t2 < instance.train_count(geo.line); ++t2) {
          if (f_first[s][static_cast<size_t>(t2)] < 0) continue;
          LinearConstraint transfer;
          transfer.name = "connect_" + std::to_string(k) + "_" + std::to_string(r) + "_" +
                          std::to_string(s) + "_" + std::to_string(t2);
          transfer.rel = Relation::kEq;
          transfer.rhs = 0;
          transfer.terms = sources[static_cast<size_t>(t2)];
          transfer.terms.push_back({f_first[s][static_cast<size_t>(t2)], -1.0});
          model.constraints.push_back(std::move(transfer));
        }
      }

      // Arrival conservation and schedule-delay coefficients.
      const SegmentGeometry& last = segs.back();
      for (int t = 0; t < instance.train_count(last.line); ++t) {
        const int v = f_last[segs.size() - 1][static_cast<size_t>(t)];
        if (v < 0) continue;
        arrival_row.terms.push_back({v, 1.0});
        const Minutes arr = index.arrival_time(last.line, t, last.alight_pos);
        grow(v);
        obj_coef[static_cast<size_t>(v)] +=
            cp.early_per_min() * std::max(0, cp.target_arrival - arr) +
            cp.late_per_min() * std::max(0, arr - cp.target_arrival);
      }
    }
    model.constraints.push_back(std::move(demand_row));
    model.constraints.push_back(std::move(arrival_row));
  }

  // Hard capacity per (line, train, leg); rows with no terms are vacuous.
  for (size_t l = 0; l < instance.lines.size(); ++l) {
    const size_t legs = instance.lines[l].leg_durations.size();
    for (int t = 0; t < instance.train_count(static_cast<LineId>(l)); ++t) {
      for (size_t e = 0; e < legs; ++e) {
        auto& terms = cap_terms[l][static_cast<size_t>(t) * legs + e];
        if (terms.empty()) continue;
        LinearConstraint cap_row;
        cap_row.name = "cap_" + std::to_string(l) + "_" + std::to_string(t) + "_" +
                       std::to_string(e);
        cap_row.rel = Relation::kLe;
        cap_row.rhs = instance.trains(static_cast<LineId>(l))[static_cast<size_t>(t)].capacity;
        cap_row.terms = std::move(terms);
        model.constraints.push_back(std::move(cap_row));
      }
    }
  }

  for (size_t v = 0; v < obj_coef.size(); ++v)
    if (obj_coef[v] != 0) model.objective.push_back({static_cast<int>(v), obj_coef[v]});
  return model;
}

std::string resolve_backend_executable(const std::string& backend) {
  namespace fs = std::filesystem;
  if (backend.find('/') != std::string::npos) {
    if (fs::exists(backend)) return backend;
    throw BackendError("backend executable not found: " + backend);
  }
  if (const char* env = std::getenv("TRANSIT_SO_BACKEND_PATH")) {
    const fs::path candidate = fs::path(env) / backend;
    if (fs::exists(candidate)) return candidate.string();
  }
  const std::string compiled = TRANSIT_SO_DEFAULT_BACKEND_DIR;
  if (!compiled.empty()) {
    const fs::path candidate = fs::path(compiled) / backend;
    if (fs::exists(candidate)) return candidate.string();
  }
  return backend;  // rely on PATH
}

SolveResult run_backend(const ModelIR& model, const std::string& backend,
                        double time_limit_sec) {
  namespace fs = std::filesystem;
  const auto t0 = std::chrono::steady_clock::now();
  const std::string exe = resolve_backend_executable(backend);

  static std::atomic<int> counter{0};
  const fs::path dir = fs::temp_directory_path() /
                       ("transit-so-" + std::to_string(::getpid()) + "-" +
                        std::to_string(counter++));
  fs::create_directories(dir);
  const fs::path model_path = dir / "model.lp";
  const fs::path solution_path = dir / "solution.txt";
  write_text_atomic(model_path.string(), write_lp(model));

  std::string command = exe + " " + model_path.string() + " " + solution_path.string();
  if (time_limit_sec > 0) command += " " + std::to_string(time_limit_sec);
  command += " > " + (dir / "backend.log").string() + " 2>&1";
  const int rc = std::system(command.c_str());

  SolveResult result;
  result.solver_name = backend;
  if (rc != 0) {
    std::ifstream log(dir / "backend.log");
    std::stringstream tail;
    tail << log.rdbuf();
    throw BackendError("backend '" + backend + "' failed (exit " + std::to_string(rc) +
                       "): " + tail.str().substr(0, 500));
  }
  std::ifstream in(solution_path);
  if (!in) throw BackendError("backend produced no solution file");
  std::string key;
  while (in >> key) {
    if (key == "status") {
      in >> result.status;
    } else if (key == "objective") {
      in >> result.objective;
    } else if (!key.empty() && key[0] == '#') {
      std::string rest;
      std::getline(in, rest);
    } else {
      double value = 0;
      in >> value;
      result.values[key] = value;
    }
  }
  fs::remove_all(dir);
  result.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (result.status.empty()) throw BackendError("backend solution file missing status");
  return result;
}

namespace {

// Demand versus reachable seats per line, for infeasibility diagnostics.
std::string infeasibility_report(const ScheduleIndex& index) {
  const TransitInstance& instance = index.instance();
  std::string report = "no denied-boarding-free assignment exists; binding capacities:";
  for (size_t l = 0; l < instance.lines.size(); ++l) {
    long cap = 0;
    for (const Train& t : instance.trains(static_cast<LineId>(l))) cap += t.capacity;
    long boarding_demand = 0;
    for (const ODPair& od : instance.od_pairs)
      for (RouteId r : od.routes)
        if (!index.segments(r).empty() && index.segments(r).front().line == static_cast<LineId>(l))
          boarding_demand += od.demand;
    report += "\n  line " + std::to_string(l) + ": total seat capacity " + std::to_string(cap) +
              ", worst-case boarding demand " + std::to_string(boarding_demand);
  }
  return report;
}

AssignmentQ q_from_values(const ScheduleIndex& index, const std::map<std::string, double>& values) {
  const TransitInstance& instance = index.instance();
  AssignmentQ q = AssignmentQ::zeros(index, AssignmentQ::Mode::kInteger);
  for (const ODPair& od : instance.od_pairs) {
    for (size_t p = 0; p < od.routes.size(); ++p) {
      const RouteId r = od.routes[p];
      for (int t = 0; t < index.option_train_count(r); ++t) {
        auto it = values.find(q_name(od.id, t, r));
        if (it == values.end()) continue;
        q.at(od.id, static_cast<int>(p), t) = std::llround(it->second);
      }
    }
  }
  return q;
}

}  // namespace

ExactResult solve_exact(const ScheduleIndex& index, const std::string& backend,
                        double time_limit_sec) {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelIR model = build_ilp(index);
  const SolveResult raw = run_backend(model, backend, time_limit_sec);
  if (raw.status == "infeasible") throw InfeasibleError(infeasibility_report(index));
  if (raw.status != "optimal" && raw.status != "limit")
    throw BackendError("backend returned status '" + raw.status + "'");
  if (raw.status == "limit" && raw.values.empty())
    throw BackendError("backend hit its limit with no incumbent");

  ExactResult out;
  out.status = raw.status;
  out.solver_name = raw.solver_name;
  Solution& sol = out.solution;
  sol.q = q_from_values(index, raw.values);
  LoadResult loaded = load(index, sol.q);
  if (!loaded.feasible)
    throw BackendError("backend solution does not load feasibly");
  sol.flow = std::move(loaded.flow);
  sol.costs = cost_breakdown(index, sol.flow);
  sol.objective = raw.objective;
  sol.iterations = 0;
  sol.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::optional<Solution> brute_force_so(const ScheduleIndex& index, double max_configurations) {
  const auto t0 = std::chrono::steady_clock::now();
  const TransitInstance& instance = index.instance();

  struct Option {
    int route_pos;
    int train;
    RouteId route;
    double cost;  // free-flow cost, exact under no denied boarding
  };
  std::vector<std::vector<Option>> options(instance.od_pairs.size());
  double configurations = 1;
  for (const ODPair& od : instance.od_pairs) {
    auto& od_options = options[static_cast<size_t>(od.id)];
    for (size_t p = 0; p < od.routes.size(); ++p) {
      const RouteId r = od.routes[p];
      for (int t = 0; t < index.option_train_count(r); ++t)
        if (index.chain(r, t).valid)
          od_options.push_back({static_cast<int>(p), t, r, index.free_flow_cost(od.id, t, r)});
    }
    if (od_options.empty()) return std::nullopt;
    // compositions of demand over options: C(demand + m - 1, m - 1)
    double ways = 1;
    const double m = static_cast<double>(od_options.size());
    for (long i = 1; i < static_cast<long>(m); ++i)
      ways *= (static_cast<double>(od.demand) + m - static_cast<double>(i)) /
              static_cast<double>(i);
    configurations *= std::max(1.0, ways);
    if (configurations > max_configurations)
      throw SizeError("brute force space too large: about " +
                      std::to_string(configurations) + " configurations");
  }

  // residual seats per (line, train, leg)
  std::vector<std::vector<long>> residual(instance.lines.size());
  for (size_t l = 0; l < instance.lines.size(); ++l) {
    const auto& trains = instance.trains(static_cast<LineId>(l));
    const size_t legs = instance.lines[l].leg_durations.size();
    residual[l].assign(trains.size() * legs, 0);
    for (size_t n = 0; n < trains.size(); ++n)
      for (size_t e = 0; e < legs; ++e) residual[l][n * legs + e] = trains[n].capacity;
  }
  auto occupy = [&](const Option& opt, long count, bool undo) -> bool {
    const auto& segs = index.segments(opt.route);
    const OptionChain& chain = index.chain(opt.route, opt.train);
    if (!undo) {
      for (size_t s = 0; s < segs.size(); ++s) {
        const size_t legs = instance.lines[static_cast<size_t>(segs[s].line)].leg_durations.size();
        const size_t base = static_cast<size_t>(chain.train_per_segment[s]) * legs;
        for (int e = segs[s].board_pos; e < segs[s].alight_pos; ++e)
          if (residual[static_cast<size_t>(segs[s].line)][base + static_cast<size_t>(e)] < count)
            return false;
      }
    }
    const long delta = undo ? count : -count;
    for (size_t s = 0; s < segs.size(); ++s) {
      const size_t legs = instance.lines[static_cast<size_t>(segs[s].line)].leg_durations.size();
      const size_t base = static_cast<size_t>(chain.train_per_segment[s]) * legs;
      for (int e = segs[s].board_pos; e < segs[s].alight_pos; ++e)
        residual[static_cast<size_t>(segs[s].line)][base + static_cast<size_t>(e)] += delta;
    }
    return true;
  };

  std::vector<std::vector<long>> current(instance.od_pairs.size());
  for (size_t k = 0; k < options.size(); ++k) current[k].assign(options[k].size(), 0);
  std::vector<std::vector<long>> best;
  double best_cost = std::numeric_limits<double>::infinity();
  bool found = false;

  // Depth-first over ODs; within an OD, allocations enumerate in ascending
  // lexicographic order, so the first minimum found is the lexicographically
  // smallest optimum.
  std::function<void(size_t, double)> visit_od = [&](size_t k, double cost_so_far) {
    if (cost_so_far >= best_cost) return;
    if (k == options.size()) {
      best = current;
      best_cost = cost_so_far;
      found = true;
      return;
    }
    const long demand = instance.od_pairs[k].demand;
    const auto& od_options = options[k];
    std::function<void(size_t, long, double)> place = [&](size_t i, long remaining,
                                                          double cost_acc) {
      if (cost_acc >= best_cost) return;
      const bool last = (i + 1 == od_options.size());
      const long lo = last ? remaining : 0;
      for (long take = lo; take <= remaining; ++take) {
        if (take > 0 && !occupy(od_options[i], take, false)) break;  // larger takes also fail
        current[k][i] = take;
        const double next_cost = cost_acc + od_options[i].cost * static_cast<double>(take);
        if (last)
          visit_od(k + 1, next_cost);
        else
          place(i + 1, remaining - take, next_cost);
        current[k][i] = 0;
        if (take > 0) occupy(od_options[i], take, true);
      }
    };
    place(0, demand, cost_so_far);
  };
  visit_od(0, 0.0);

  if (!found) return std::nullopt;

  Solution sol;
  sol.q = AssignmentQ::zeros(index, AssignmentQ::Mode::kInteger);
  for (size_t k = 0; k < options.size(); ++k)
    for (size_t i = 0; i < options[k].size(); ++i)
      sol.q.at(static_cast<OdId>(k), options[k][i].route_pos, options[k][i].train) =
          static_cast<double>(best[k][i]);
  LoadResult loaded = load(index, sol.q);
  sol.flow = std::move(loaded.flow);
  sol.costs = cost_breakdown(index, sol.flow);
  sol.objective = sol.costs.system_total;
  sol.iterations = 0;
  sol.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

}  // namespace transit
