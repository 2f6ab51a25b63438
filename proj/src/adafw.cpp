#include "transit/adafw.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

namespace transit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double golden_section(const std::function<double(double)>& evaluate, double lo, double hi,
                      double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - (b - a) * inv_phi;
  double d = a + (b - a) * inv_phi;
  double fc = evaluate(c);
  double fd = evaluate(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * inv_phi;
      fc = evaluate(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * inv_phi;
      fd = evaluate(d);
    }
  }
  return (a + b) / 2.0;
}

StepSizes step_sizes(const ScheduleIndex& index, const OptionCostTable& table,
                     const AssignmentQ& q, double theta) {
  const TransitInstance& instance = index.instance();
  StepSizes out;
  out.theta = theta;
  const size_t n_od = instance.od_pairs.size();
  out.od_gap_ratio.assign(n_od, 0.0);
  out.option_weight.resize(n_od);
  out.sigma.resize(n_od);

  for (OdId k = 0; k < static_cast<OdId>(n_od); ++k) {
    const auto& od_entries = table.entries[static_cast<size_t>(k)];
    const OptionRef best = best_option(table, k);
    const int n_options = table.valid_options[static_cast<size_t>(k)];

    double sum_all = 0, sum_nonopt = 0;
    for (size_t p = 0; p < od_entries.size(); ++p) {
      for (size_t t = 0; t < od_entries[p].size(); ++t) {
        if (!od_entries[p][t].valid) continue;
        sum_all += od_entries[p][t].avc;
        if (!(static_cast<int>(p) == best.route_pos && static_cast<int>(t) == best.train))
          sum_nonopt += od_entries[p][t].avc;
      }
    }
    // average of non-optimal costs over the total option count
    const double c_bar = n_options > 0 ? sum_nonopt / n_options : 0.0;
    double ratio = 0.0;
    if (c_bar > 0)
      ratio = std::clamp((c_bar - table.avc_star[static_cast<size_t>(k)]) / c_bar, 0.0, 1.0);
    out.od_gap_ratio[static_cast<size_t>(k)] = ratio;

    auto& weights = out.option_weight[static_cast<size_t>(k)];
    auto& sigma = out.sigma[static_cast<size_t>(k)];
    weights.resize(od_entries.size());
    sigma.resize(od_entries.size());
    for (size_t p = 0; p < od_entries.size(); ++p) {
      weights[p].assign(od_entries[p].size(), 0.0);
      sigma[p].assign(od_entries[p].size(), 0.0);
      for (size_t t = 0; t < od_entries[p].size(); ++t) {
        if (!od_entries[p][t].valid || sum_all <= 0) continue;
        weights[p][t] = od_entries[p][t].avc / sum_all;
        sigma[p][t] = theta * ratio * weights[p][t];
      }
    }
  }
  (void)q;
  return out;
}

AssignmentQ apply_step(const ScheduleIndex& index, const OptionCostTable& table,
                       const AssignmentQ& q, double theta) {
  const StepSizes steps = step_sizes(index, table, q, theta);
  AssignmentQ next = q;
  for (OdId k = 0; k < static_cast<OdId>(q.values.size()); ++k) {
    const OptionRef best = best_option(table, k);
    double others = 0;
    auto& block = next.values[static_cast<size_t>(k)];
    for (size_t p = 0; p < block.size(); ++p) {
      for (size_t t = 0; t < block[p].size(); ++t) {
        if (static_cast<int>(p) == best.route_pos && static_cast<int>(t) == best.train) continue;
        const double sigma = steps.sigma[static_cast<size_t>(k)][p][t];
        block[p][t] *= (1.0 - sigma);
        others += block[p][t];
      }
    }
    // close the simplex onto the best option so OD totals hold exactly
    block[static_cast<size_t>(best.route_pos)][static_cast<size_t>(best.train)] =
        std::max(0.0, static_cast<double>(index.instance().od(k).demand) - others);
  }
  return next;
}

namespace {

struct Evaluated {
  bool feasible = false;
  double objective = kInf;
  LoadResult loaded;
  OptionCostTable table;
};

Evaluated evaluate(const ScheduleIndex& index, const AssignmentQ& q, Objective objective) {
  Evaluated out;
  out.loaded = load(index, q);
  if (!out.loaded.feasible) return out;
  out.table = attribute_costs(index, q, out.loaded.flow);
  out.feasible = true;
  if (objective == Objective::kUserEquilibrium) {
    out.objective = ue_gap(out.table, q);
  } else {
    out.objective = cost_breakdown(index, out.loaded.flow).system_total;
  }
  return out;
}

void log_progress(std::ostream* progress, const char* phase, long iter, double objective,
                  double theta, double moved) {
  if (!progress) return;
  char buf[192];
  std::snprintf(buf, sizeof(buf),
                "{\"iteration\":%ld,\"phase\":\"%s\",\"objective\":%.6f,\"theta\":%.6f,"
                "\"moved\":%.3f}\n",
                iter, phase, objective, theta, moved);
  *progress << buf;
}

// Greedy capacity-aware seed: fill options in free-flow cost order while
// chain slots last. Produces a denied-boarding-free assignment.
AssignmentQ greedy_seed(const ScheduleIndex& index) {
  const TransitInstance& instance = index.instance();
  AssignmentQ q = AssignmentQ::zeros(index, AssignmentQ::Mode::kInteger);

  std::vector<std::vector<long>> residual(instance.lines.size());
  for (size_t l = 0; l < instance.lines.size(); ++l) {
    const auto& trains = instance.trains(static_cast<LineId>(l));
    const size_t legs = instance.lines[l].leg_durations.size();
    residual[l].assign(trains.size() * legs, 0);
    for (size_t n = 0; n < trains.size(); ++n)
      for (size_t e = 0; e < legs; ++e) residual[l][n * legs + e] = trains[n].capacity;
  }

  for (const ODPair& od : instance.od_pairs) {
    struct Candidate {
      double cost;
      OptionRef ref;
    };
    std::vector<Candidate> candidates;
    for (size_t p = 0; p < od.routes.size(); ++p) {
      const RouteId r = od.routes[p];
      for (int t = 0; t < index.option_train_count(r); ++t) {
        if (!index.chain(r, t).valid) continue;
        candidates.push_back({index.free_flow_cost(od.id, t, r),
                              {static_cast<int>(p), t}});
      }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      if (a.cost != b.cost) return a.cost < b.cost;
      return a.ref < b.ref;
    });
    long remaining = od.demand;
    for (const Candidate& cand : candidates) {
      if (remaining <= 0) break;
      const RouteId r = od.routes[static_cast<size_t>(cand.ref.route_pos)];
      const auto& segs = index.segments(r);
      const OptionChain& chain = index.chain(r, cand.ref.train);
      long room = remaining;
      for (size_t s = 0; s < segs.size() && room > 0; ++s) {
        const size_t legs = instance.lines[static_cast<size_t>(segs[s].line)].leg_durations.size();
        const long train = chain.train_per_segment[s];
        for (int e = segs[s].board_pos; e < segs[s].alight_pos; ++e)
          room = std::min(room, residual[static_cast<size_t>(segs[s].line)]
                                        [static_cast<size_t>(train) * legs + static_cast<size_t>(e)]);
      }
      if (room <= 0) continue;
      for (size_t s = 0; s < segs.size(); ++s) {
        const size_t legs = instance.lines[static_cast<size_t>(segs[s].line)].leg_durations.size();
        const long train = chain.train_per_segment[s];
        for (int e = segs[s].board_pos; e < segs[s].alight_pos; ++e)
          residual[static_cast<size_t>(segs[s].line)]
                  [static_cast<size_t>(train) * legs + static_cast<size_t>(e)] -= room;
      }
      q.at(od.id, cand.ref.route_pos, cand.ref.train) += static_cast<double>(room);
      remaining -= room;
    }
    if (remaining > 0)
      throw SetupError("no feasible initial assignment for od " + std::to_string(od.id) +
                       ": " + std::to_string(remaining) + " passengers unplaced");
  }
  return q;
}

}  // namespace

AssignmentQ initial_assignment(const ScheduleIndex& index) {
  const TransitInstance& instance = index.instance();
  AssignmentQ q = AssignmentQ::zeros(index, AssignmentQ::Mode::kInteger);
  for (const ODPair& od : instance.od_pairs) {
    double best_cost = kInf;
    OptionRef best{-1, -1};
    for (size_t p = 0; p < od.routes.size(); ++p) {
      const RouteId r = od.routes[p];
      for (int t = 0; t < index.option_train_count(r); ++t) {
        if (!index.chain(r, t).valid) continue;
        const double c = index.free_flow_cost(od.id, t, r);
        const OptionRef ref{static_cast<int>(p), t};
        if (c < best_cost || (c == best_cost && ref < best)) {
          best_cost = c;
          best = ref;
        }
      }
    }
    if (best.route_pos < 0)
      throw SetupError("od " + std::to_string(od.id) + " has no servable option");
    q.at(od.id, best.route_pos, best.train) = static_cast<double>(od.demand);
  }
  if (load(index, q).feasible) return q;
  return greedy_seed(index);
}

Solution solve(const ScheduleIndex& index, Objective objective, const SolverConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const TransitInstance& instance = index.instance();
  const int n_od = static_cast<int>(instance.od_pairs.size());
  long iterations = 0;

  AssignmentQ q = initial_assignment(index);
  q.mode = AssignmentQ::Mode::kContinuous;
  Evaluated current = evaluate(index, q, objective);
  if (!current.feasible) throw SetupError("initial assignment does not load feasibly");
  log_progress(config.progress, "system", 0, current.objective, 0.0, 0.0);

  // System-based flow shifting: continuous convex-combination moves.
  for (int j = 0; j < config.max_system_iters; ++j) {
    const OptionCostTable& table = current.table;
    auto probe = [&](double theta) {
      const AssignmentQ candidate = apply_step(index, table, q, theta);
      return evaluate(index, candidate, objective).objective;
    };
    const double theta = golden_section(probe, 0.0, 1.0, config.golden_section_tol);
    AssignmentQ next = apply_step(index, table, q, theta);
    Evaluated eval_next = evaluate(index, next, objective);
    ++iterations;
    if (!eval_next.feasible || eval_next.objective > current.objective - config.convergence_eps)
      break;
    double moved = 0;
    for (OdId k = 0; k < n_od; ++k)
      for (size_t p = 0; p < q.values[static_cast<size_t>(k)].size(); ++p)
        for (size_t t = 0; t < q.values[static_cast<size_t>(k)][p].size(); ++t)
          moved += std::abs(next.values[static_cast<size_t>(k)][p][t] -
                            q.values[static_cast<size_t>(k)][p][t]);
    q = std::move(next);
    current = std::move(eval_next);
    log_progress(config.progress, "system", j + 1, current.objective, theta, moved / 2.0);
  }

  // Integer restoration before the OD loop.
  q = q.rounded(index);
  Evaluated int_eval = evaluate(index, q, objective);
  if (!int_eval.feasible) {
    // rounding pushed a knife-edge option over capacity; restart from the
    // greedy denied-boarding-free seed
    q = greedy_seed(index);
    int_eval = evaluate(index, q, objective);
    if (!int_eval.feasible) throw SetupError("no feasible integer assignment found");
  }
  current = std::move(int_eval);
  log_progress(config.progress, "round", iterations, current.objective, 0.0, 0.0);

  // OD-based one-passenger shifting with a terminal certification sweep.
  std::mt19937_64 rng(config.rng_seed);
  auto try_od_move = [&](OdId k) -> bool {
    const OptionRef best = best_option(current.table, k);
    struct Source {
      double avc;
      OptionRef ref;
    };
    std::vector<Source> sources;
    const auto& block = q.values[static_cast<size_t>(k)];
    for (size_t p = 0; p < block.size(); ++p)
      for (size_t t = 0; t < block[p].size(); ++t) {
        const OptionRef ref{static_cast<int>(p), static_cast<int>(t)};
        if (block[p][t] >= 1.0 && !(ref == best))
          sources.push_back({current.table.at(k, ref.route_pos, ref.train).avc, ref});
      }
    std::sort(sources.begin(), sources.end(), [](const Source& a, const Source& b) {
      if (a.avc != b.avc) return a.avc > b.avc;
      return a.ref < b.ref;
    });
    for (const Source& src : sources) {
      AssignmentQ candidate = q;
      candidate.at(k, src.ref.route_pos, src.ref.train) -= 1.0;
      candidate.at(k, best.route_pos, best.train) += 1.0;
      Evaluated eval = evaluate(index, candidate, objective);
      ++iterations;
      if (eval.feasible && eval.objective < current.objective - config.convergence_eps) {
        q = std::move(candidate);
        current = std::move(eval);
        return true;
      }
      if (iterations >= config.max_od_iters) return false;
    }
    return false;
  };

  int stall = 0;
  while (iterations < config.max_od_iters) {
    if (stall >= config.od_stall_limit) {
      // certification sweep: no single-passenger move to a best option helps
      bool any = false;
      for (OdId k = 0; k < n_od && iterations < config.max_od_iters; ++k) {
        while (try_od_move(k)) {
          any = true;
          log_progress(config.progress, "od", iterations, current.objective, 1.0, 1.0);
        }
      }
      if (!any) break;
      stall = 0;
      continue;
    }
    const OdId k = static_cast<OdId>(rng() % static_cast<std::uint64_t>(n_od));
    if (try_od_move(k)) {
      stall = 0;
      log_progress(config.progress, "od", iterations, current.objective, 1.0, 1.0);
    } else {
      ++stall;
    }
  }

  Solution solution;
  solution.q = std::move(q);
  solution.flow = std::move(current.loaded.flow);
  solution.costs = cost_breakdown(index, solution.flow);
  solution.objective = current.objective;
  solution.iterations = iterations;
  solution.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  log_progress(config.progress, "done", iterations, solution.objective, 0.0, 0.0);
  return solution;
}

std::string assignment_csv(const ScheduleIndex& index, const AssignmentQ& q) {
  std::string out = "od,train,route,passengers\n";
  char buf[96];
  const TransitInstance& instance = index.instance();
  for (const ODPair& od : instance.od_pairs) {
    for (size_t p = 0; p < od.routes.size(); ++p) {
      const auto& per_train = q.values[static_cast<size_t>(od.id)][p];
      for (size_t t = 0; t < per_train.size(); ++t) {
        if (per_train[t] <= 0) continue;
        std::snprintf(buf, sizeof(buf), "%d-%d,%zu,%d,%.3f\n", od.origin, od.destination, t,
                      od.routes[p], per_train[t]);
        out += buf;
      }
    }
  }
  return out;
}

}  // namespace transit
