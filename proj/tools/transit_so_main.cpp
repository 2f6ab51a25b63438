#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "transit/adafw.hpp"
#include "transit/benchmarks.hpp"
#include "transit/costs.hpp"
#include "transit/exactso.hpp"
#include "transit/instance_io.hpp"
#include "transit/scenario.hpp"
#include "transit/schedule.hpp"

namespace {

using nlohmann::json;
using namespace transit;

void print_error_json(const std::string& kind, const std::string& message,
                      const std::vector<Violation>& violations = {}) {
  json diag;
  diag["error"] = kind;
  diag["message"] = message;
  if (!violations.empty()) {
    diag["violations"] = json::array();
    for (const Violation& v : violations)
      diag["violations"].push_back({{"entity", v.entity}, {"rule", v.rule}, {"detail", v.detail}});
  }
  std::cerr << diag.dump(2) << std::endl;
}

TransitInstance resolve_instance(const std::string& spec) {
  if (std::filesystem::exists(spec)) return load_instance_file(spec);
  return load_benchmark(spec);  // throws on unknown names
}

struct ScenarioArgs {
  double demand_scale = 100;
  double capacity_scale = 100;
  std::string routes = "base";
};

TransitInstance apply_scenario_args(const TransitInstance& base, const ScenarioArgs& args) {
  ScenarioSpec spec;
  spec.demand_scale = args.demand_scale;
  spec.capacity_scale = args.capacity_scale;
  if (args.routes == "base") {
    spec.enabled_routes = routes_in_group(base, "base");
  } else if (args.routes != "extended") {
    throw CLI::ValidationError("--routes must be base or extended");
  }
  return apply_scenario(base, spec);
}

json solution_json(const ScheduleIndex& index, const std::string& solver, const Solution& sol) {
  json out;
  out["solver"] = solver;
  out["objective"] = sol.objective;
  out["total_cost"] = sol.costs.system_total;
  out["iterations"] = sol.iterations;
  out["wall_time_sec"] = sol.wall_time_sec;
  json per_od = json::array();
  for (size_t k = 0; k < sol.costs.per_od.size(); ++k) {
    const ODPair& od = index.instance().od(static_cast<OdId>(k));
    const OdCost& c = sol.costs.per_od[k];
    per_od.push_back({{"od", std::to_string(od.origin) + "-" + std::to_string(od.destination)},
                      {"ivcst", c.ivcst},
                      {"chcst", c.chcst},
                      {"dbcst", c.dbcst},
                      {"elcst", c.elcst},
                      {"total", c.total()}});
  }
  out["per_od"] = per_od;
  return out;
}

Solution run_solver(const ScheduleIndex& index, const std::string& solver,
                    const std::string& backend, std::uint64_t seed, double tol,
                    std::ostream* progress, std::string* status_out = nullptr) {
  if (solver == "exact-so") {
    ExactResult exact = solve_exact(index, backend);
    if (status_out) *status_out = exact.status;
    return std::move(exact.solution);
  }
  SolverConfig config;
  config.rng_seed = seed;
  config.golden_section_tol = tol;
  config.progress = progress;
  if (status_out) *status_out = "optimal";
  if (solver == "ue") return solve(index, Objective::kUserEquilibrium, config);
  if (solver == "approx-so") return solve(index, Objective::kApproxSystemOptimum, config);
  throw CLI::ValidationError("--solver must be ue, approx-so or exact-so");
}

std::string three_way_comparison_csv(const ScheduleIndex& index, const Solution* ue,
                                     const Solution* approx, const Solution* exact) {
  std::string out = "od,cost_ue,cost_approx_so,cost_exact_so,impacted,contribution_per_passenger\n";
  const Solution* reference = exact ? exact : approx;
  std::vector<double> impacted, contribution;
  if (ue && reference) {
    impacted = impacted_passengers(ue->q, reference->q);
    std::vector<double> cu, cs;
    for (const OdCost& c : ue->costs.per_od) cu.push_back(c.total());
    for (const OdCost& c : reference->costs.per_od) cs.push_back(c.total());
    contribution = contribution_per_passenger(cu, cs, impacted);
  }
  char buf[200];
  const size_t n = index.instance().od_pairs.size();
  for (size_t k = 0; k < n; ++k) {
    const ODPair& od = index.instance().od(static_cast<OdId>(k));
    auto cell = [&](const Solution* sol) {
      if (!sol) return std::string();
      std::snprintf(buf, sizeof(buf), "%.2f", sol->costs.per_od[k].total());
      return std::string(buf);
    };
    std::string impacted_cell, contribution_cell;
    if (!impacted.empty()) {
      std::snprintf(buf, sizeof(buf), "%.1f", impacted[k]);
      impacted_cell = buf;
      std::snprintf(buf, sizeof(buf), "%.2f", contribution[k]);
      contribution_cell = buf;
    }
    out += std::to_string(od.origin) + "-" + std::to_string(od.destination) + "," + cell(ue) +
           "," + cell(approx) + "," + cell(exact) + "," + impacted_cell + "," +
           contribution_cell + "\n";
  }
  return out;
}

std::vector<double> parse_scale_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  if (out.empty()) throw CLI::ValidationError("empty scale list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schedule-based transit assignment: user equilibrium, approximate and exact "
               "system optimum"};
  app.require_subcommand(1);

  std::string instance_spec, out_dir = ".", solver = "exact-so", backend = "highs";
  std::string routes = "base", export_path, lp_format = "lp";
  std::string demand_scales = "100", capacity_scales = "100", solvers_arg = "ue,exact-so";
  std::uint64_t seed = 1;
  double gs_tol = 1e-3;
  bool events = false;

  auto add_common = [&](CLI::App* cmd, bool with_scenario) {
    cmd->add_option("--instance", instance_spec,
                    "instance file or builtin name (hk-lite, toy-1line, toy-2line)")
        ->required();
    if (with_scenario) {
      cmd->add_option("--routes", routes, "route set: base or extended");
      cmd->add_option("--seed", seed, "random seed");
      cmd->add_option("--backend", backend, "external MILP backend for exact-so");
      cmd->add_option("--gs-tol", gs_tol, "golden-section tolerance");
      cmd->add_option("--out", out_dir, "output directory");
    }
  };

  CLI::App* validate_cmd = app.add_subcommand("validate", "check instance invariants");
  add_common(validate_cmd, false);

  CLI::App* assign_cmd = app.add_subcommand("assign", "solve one assignment and write reports");
  add_common(assign_cmd, true);
  assign_cmd->add_option("--solver", solver, "ue, approx-so or exact-so");
  double assign_demand = 100, assign_capacity = 100;
  assign_cmd->add_option("--demand-scale", assign_demand, "demand percent");
  assign_cmd->add_option("--capacity-scale", assign_capacity, "capacity percent");
  assign_cmd->add_flag("--events", events, "write the loader event trace");

  CLI::App* scenario_cmd =
      app.add_subcommand("scenario", "apply demand/capacity/route scenario, then assign");
  add_common(scenario_cmd, true);
  scenario_cmd->add_option("--solver", solver, "ue, approx-so or exact-so");
  double scen_demand = 100, scen_capacity = 100;
  scenario_cmd->add_option("--demand-scale", scen_demand, "demand percent")->required();
  scenario_cmd->add_option("--capacity-scale", scen_capacity, "capacity percent");
  scenario_cmd->add_flag("--events", events, "write the loader event trace");

  CLI::App* compare_cmd = app.add_subcommand(
      "compare", "run several solvers and write comparison reports; scale lists make a matrix");
  add_common(compare_cmd, true);
  compare_cmd->add_option("--solvers", solvers_arg, "comma list of ue, approx-so, exact-so");
  compare_cmd->add_option("--demand-scale", demand_scales, "demand percent or comma list");
  compare_cmd->add_option("--capacity-scale", capacity_scales, "capacity percent or comma list");

  CLI::App* export_cmd = app.add_subcommand("export-lp", "write the exact-SO model file");
  add_common(export_cmd, true);
  export_cmd->add_option("--export-lp", export_path, "model file path")->required();
  export_cmd->add_option("--format", lp_format, "lp or mps");
  double export_demand = 100, export_capacity = 100;
  export_cmd->add_option("--demand-scale", export_demand, "demand percent");
  export_cmd->add_option("--capacity-scale", export_capacity, "capacity percent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
      return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    const TransitInstance raw = resolve_instance(instance_spec);

    if (validate_cmd->parsed()) {
      const std::vector<Violation> violations = validate_instance(raw);
      if (violations.empty()) {
        std::cout << "instance ok: " << raw.name << ", " << raw.od_pairs.size()
                  << " OD pairs, total demand " << raw.total_demand() << "\n";
        return 0;
      }
      print_error_json("validation", "instance violates invariants", violations);
      return 1;
    }

    const std::vector<Violation> violations = validate_instance(raw);
    if (!violations.empty()) {
      print_error_json("validation", "instance violates invariants", violations);
      return 1;
    }

    namespace fs = std::filesystem;

    if (export_cmd->parsed()) {
      ScenarioArgs args{export_demand, export_capacity, routes};
      const TransitInstance scoped = apply_scenario_args(raw, args);
      const ScheduleIndex index(scoped);
      const ModelIR model = build_ilp(index);
      write_text_atomic(export_path, lp_format == "mps" ? write_mps(model) : write_lp(model));
      std::cout << "wrote " << export_path << ": " << model.vars.size() << " variables, "
                << model.constraints.size() << " constraints\n";
      return 0;
    }

    if (assign_cmd->parsed() || scenario_cmd->parsed()) {
      const bool scenario_mode = scenario_cmd->parsed();
      ScenarioArgs args{scenario_mode ? scen_demand : assign_demand,
                       scenario_mode ? scen_capacity : assign_capacity, routes};
      const TransitInstance scoped = apply_scenario_args(raw, args);
      const ScheduleIndex index(scoped);

      fs::create_directories(out_dir);
      std::ofstream progress(fs::path(out_dir) / "progress.jsonl");
      std::string status;
      const Solution sol = run_solver(index, solver, backend, seed, gs_tol, &progress, &status);

      write_text_atomic((fs::path(out_dir) / "assignment.csv").string(),
                        assignment_csv(index, sol.q));
      write_text_atomic((fs::path(out_dir) / "od_costs.csv").string(),
                        od_costs_csv(index, sol.costs));
      if (events) {
        std::ostringstream trace;
        LoadOptions options;
        options.event_trace = &trace;
        load(index, sol.q, options);
        write_text_atomic((fs::path(out_dir) / "events.csv").string(), trace.str());
      }
      json summary;
      summary["command"] = scenario_mode ? "scenario" : "assign";
      summary["instance"] = scoped.name;
      summary["scenario"] = {{"demand_scale", args.demand_scale},
                             {"capacity_scale", args.capacity_scale},
                             {"routes", routes}};
      summary["status"] = status;
      summary["result"] = solution_json(index, solver, sol);
      write_text_atomic((fs::path(out_dir) / "summary.json").string(), summary.dump(2) + "\n");
      std::cout << solver << " objective " << sol.objective << ", total cost $"
                << sol.costs.system_total << "\n";
      return 0;
    }

    if (compare_cmd->parsed()) {
      const std::vector<double> demand_list = parse_scale_list(demand_scales);
      const std::vector<double> capacity_list = parse_scale_list(capacity_scales);
      std::vector<std::string> solver_list;
      {
        std::stringstream ss(solvers_arg);
        std::string item;
        while (std::getline(ss, item, ',')) solver_list.push_back(item);
      }
      fs::create_directories(out_dir);

      if (demand_list.size() > 1 || capacity_list.size() > 1) {
        // scenario matrix
        std::vector<ScenarioSpec> scenarios;
        for (double d : demand_list)
          for (double c : capacity_list) {
            ScenarioSpec spec;
            spec.demand_scale = d;
            spec.capacity_scale = c;
            if (routes == "base") spec.enabled_routes = routes_in_group(raw, "base");
            scenarios.push_back(spec);
          }
        const std::vector<MatrixCell> cells = run_matrix(raw, scenarios, solver_list, backend, seed);
        write_text_atomic((fs::path(out_dir) / "matrix.csv").string(), matrix_csv(cells));
        json summary;
        summary["command"] = "compare";
        summary["instance"] = raw.name;
        summary["matrix"] = json::array();
        for (const MatrixCell& cell : cells)
          summary["matrix"].push_back({{"scenario", cell.scenario},
                                       {"solver", cell.solver},
                                       {"ok", cell.ok},
                                       {"total_cost", cell.total_cost},
                                       {"pscir", cell.improvement_ratio},
                                       {"error", cell.error}});
        write_text_atomic((fs::path(out_dir) / "summary.json").string(), summary.dump(2) + "\n");
        std::cout << "matrix with " << cells.size() << " cells written to " << out_dir << "\n";
        return 0;
      }

      ScenarioArgs args{demand_list[0], capacity_list[0], routes};
      const TransitInstance scoped = apply_scenario_args(raw, args);
      const ScheduleIndex index(scoped);
      std::optional<Solution> ue, approx, exact;
      json results;
      for (const std::string& s : solver_list) {
        std::string status;
        Solution sol = run_solver(index, s, backend, seed, gs_tol, nullptr, &status);
        results[s] = solution_json(index, s, sol);
        results[s]["status"] = status;
        if (s == "ue") ue = std::move(sol);
        else if (s == "approx-so") approx = std::move(sol);
        else if (s == "exact-so") exact = std::move(sol);
      }

      write_text_atomic((fs::path(out_dir) / "comparison.csv").string(),
                        three_way_comparison_csv(index, ue ? &*ue : nullptr,
                                                 approx ? &*approx : nullptr,
                                                 exact ? &*exact : nullptr));
      json summary;
      summary["command"] = "compare";
      summary["instance"] = scoped.name;
      summary["results"] = results;
      const Solution* reference = exact ? &*exact : (approx ? &*approx : nullptr);
      if (ue && reference) {
        const ComparisonReport report = compare_assignments(index, *ue, *reference);
        summary["pscir"] = {{"reference", exact ? "exact-so" : "approx-so"},
                            {"value", report.improvement_ratio}};
        if (approx && exact)
          summary["pscir"]["approx"] = pscir(ue->costs.system_total, approx->costs.system_total);
        write_text_atomic((fs::path(out_dir) / "shift_histogram.csv").string(),
                          shift_histogram_csv(report.shifts));
        json bins = json::object();
        for (const auto& [shift, mass] : report.shifts.bins)
          bins[std::to_string(shift)] = mass;
        summary["shift_histogram"] = {{"moved_bins", bins}, {"unmoved", report.shifts.unmoved}};
      }
      std::string link_csv =
          "model,line,leg,from_station,to_station,train,departure_minute,passengers,zero_flow\n";
      auto append_links = [&](const char* model, const Solution& sol) {
        std::string body = link_flows_csv(index, sol.flow);
        body.erase(0, body.find('\n') + 1);
        std::stringstream rows(body);
        std::string row;
        while (std::getline(rows, row))
          if (!row.empty()) link_csv += std::string(model) + "," + row + "\n";
      };
      if (ue) append_links("ue", *ue);
      if (approx) append_links("approx-so", *approx);
      if (exact) append_links("exact-so", *exact);
      write_text_atomic((fs::path(out_dir) / "link_flows.csv").string(), link_csv);
      write_text_atomic((fs::path(out_dir) / "summary.json").string(), summary.dump(2) + "\n");
      std::cout << "comparison written to " << out_dir << "\n";
      return 0;
    }
  } catch (const IoError& e) {
    print_error_json("io", e.what());
    return 1;
  } catch (const InfeasibleError& e) {
    print_error_json("infeasible", e.what());
    return 1;
  } catch (const SetupError& e) {
    print_error_json("infeasible", e.what());
    return 1;
  } catch (const CLI::ValidationError& e) {
    print_error_json("usage", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    print_error_json("usage", e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error_json("internal", e.what());
    return 1;
  }
  return 0;
}
