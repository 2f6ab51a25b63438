#include "transit/loader.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace transit {

namespace {
constexpr double kEps = 1e-6;
}

FlowState::FlowState(const ScheduleIndex& index, AssignmentQ::Mode mode) : mode_(mode) {
  const TransitInstance& instance = index.instance();
  od_offset_.resize(instance.od_pairs.size());
  routes_per_od_.resize(instance.od_pairs.size());
  size_t slots = 0;
  for (const ODPair& od : instance.od_pairs) {
    od_offset_[static_cast<size_t>(od.id)] = slots;
    routes_per_od_[static_cast<size_t>(od.id)] = static_cast<int>(od.routes.size());
    slots += od.routes.size();
  }
  f_.resize(slots);
  g_.resize(slots);
  db_.resize(slots);
  seg_legs_.resize(slots);
  for (const ODPair& od : instance.od_pairs) {
    for (size_t p = 0; p < od.routes.size(); ++p) {
      const size_t slot = od_offset_[static_cast<size_t>(od.id)] + p;
      const auto& segs = index.segments(od.routes[p]);
      f_[slot].resize(segs.size());
      g_[slot].resize(segs.size());
      db_[slot].resize(segs.size());
      seg_legs_[slot].resize(segs.size());
      for (size_t s = 0; s < segs.size(); ++s) {
        const int trains = instance.train_count(segs[s].line);
        const int legs = segs[s].alight_pos - segs[s].board_pos;
        seg_legs_[slot][s] = legs;
        f_[slot][s].assign(static_cast<size_t>(trains * legs), 0.0);
        g_[slot][s].assign(static_cast<size_t>(trains), 0.0);
        db_[slot][s].assign(static_cast<size_t>(trains), 0.0);
      }
    }
  }
  onboard_.resize(instance.lines.size());
  line_legs_.resize(instance.lines.size());
  for (size_t l = 0; l < instance.lines.size(); ++l) {
    const int legs = static_cast<int>(instance.lines[l].leg_durations.size());
    line_legs_[l] = legs;
    onboard_[l].assign(static_cast<size_t>(instance.train_count(static_cast<LineId>(l))) *
                           static_cast<size_t>(legs),
                       0.0);
  }
}

double FlowState::onboard(LineId line, int train, int leg_pos) const {
  return onboard_[static_cast<size_t>(line)]
                 [static_cast<size_t>(train * line_legs_[static_cast<size_t>(line)] + leg_pos)];
}

double& FlowState::onboard(LineId line, int train, int leg_pos) {
  return onboard_[static_cast<size_t>(line)]
                 [static_cast<size_t>(train * line_legs_[static_cast<size_t>(line)] + leg_pos)];
}

std::vector<double> board(const std::vector<double>& waiting, double residual_capacity,
                          AssignmentQ::Mode mode) {
  std::vector<double> boarded(waiting.size(), 0.0);
  const double total = std::accumulate(waiting.begin(), waiting.end(), 0.0);
  if (total <= 0) return boarded;
  if (residual_capacity <= 0) return boarded;
  if (total <= residual_capacity) return waiting;

  if (mode == AssignmentQ::Mode::kContinuous) {
    const double frac = residual_capacity / total;
    for (size_t i = 0; i < waiting.size(); ++i) boarded[i] = waiting[i] * frac;
    return boarded;
  }

  // Largest-remainder apportionment, ties to the lower group index.
  const long long seats = static_cast<long long>(std::floor(residual_capacity + 1e-9));
  long long assigned = 0;
  std::vector<std::pair<double, size_t>> remainders;
  remainders.reserve(waiting.size());
  for (size_t i = 0; i < waiting.size(); ++i) {
    const double quota = waiting[i] * static_cast<double>(seats) / total;
    double fl = std::floor(quota + 1e-9);
    boarded[i] = fl;
    assigned += static_cast<long long>(fl);
    remainders.push_back({quota - fl, i});
  }
  std::stable_sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    return a.first > b.first;
  });
  for (const auto& [rem, i] : remainders) {
    if (assigned >= seats) break;
    if (boarded[i] + 1.0 > waiting[i] + 1e-9) continue;
    boarded[i] += 1.0;
    ++assigned;
  }
  return boarded;
}

namespace {

struct PlatformGroup {
  OdId k = 0;
  int p = 0;
  int seg = 0;
  int await = 0;  // train index the group is waiting for
  double count = 0;
};

struct OnboardGroup {
  OdId k = 0;
  int p = 0;
  int seg = 0;
  double count = 0;
};

bool group_key_less(const PlatformGroup& a, const PlatformGroup& b) {
  if (a.k != b.k) return a.k < b.k;
  if (a.p != b.p) return a.p < b.p;
  return a.seg < b.seg;
}

}  // namespace

LoadResult load(const ScheduleIndex& index, const AssignmentQ& q, const LoadOptions& options) {
  const TransitInstance& instance = index.instance();

  if (q.values.size() != instance.od_pairs.size())
    throw InputError("assignment has wrong OD count");
  for (const ODPair& od : instance.od_pairs) {
    const auto& block = q.values[static_cast<size_t>(od.id)];
    if (block.size() != od.routes.size()) throw InputError("assignment has wrong route count");
    for (size_t p = 0; p < block.size(); ++p) {
      if (static_cast<int>(block[p].size()) != index.option_train_count(od.routes[p]))
        throw InputError("assignment has wrong train count");
      for (double v : block[p])
        if (v < 0 || !std::isfinite(v)) throw InputError("assignment entry negative or non-finite");
    }
  }

  LoadResult result;
  result.flow = FlowState(index, q.mode);
  FlowState& flow = result.flow;

  // platform[line][pos] -> waiting groups
  std::vector<std::vector<std::vector<PlatformGroup>>> platform(instance.lines.size());
  for (size_t l = 0; l < instance.lines.size(); ++l)
    platform[l].resize(instance.lines[l].stations.size());
  std::vector<std::vector<std::vector<OnboardGroup>>> onboard(instance.lines.size());
  std::vector<std::vector<double>> onboard_count(instance.lines.size());
  for (size_t l = 0; l < instance.lines.size(); ++l) {
    onboard[l].resize(static_cast<size_t>(instance.train_count(static_cast<LineId>(l))));
    onboard_count[l].assign(static_cast<size_t>(instance.train_count(static_cast<LineId>(l))), 0.0);
  }

  double placed = 0;
  for (const ODPair& od : instance.od_pairs) {
    for (size_t p = 0; p < od.routes.size(); ++p) {
      const auto& segs = index.segments(od.routes[p]);
      const auto& per_train = q.values[static_cast<size_t>(od.id)][p];
      for (size_t t = 0; t < per_train.size(); ++t) {
        if (per_train[t] <= 0) continue;
        platform[static_cast<size_t>(segs[0].line)][static_cast<size_t>(segs[0].board_pos)]
            .push_back({od.id, static_cast<int>(p), 0, static_cast<int>(t), per_train[t]});
        placed += per_train[t];
      }
    }
  }

  double arrived = 0, stranded_total = 0, onboard_total = 0, platform_total = placed;

  if (options.event_trace)
    *options.event_trace << "time,line,train,station,event,boarded,denied,alighted,onboard_after\n";

  for (const ScheduleEvent& ev : index.events()) {
    const Line& line = instance.lines[static_cast<size_t>(ev.line)];
    const StationId station = line.stations[static_cast<size_t>(ev.pos)];
    if (ev.kind == ScheduleEvent::kArrival) {
      auto& groups = onboard[static_cast<size_t>(ev.line)][static_cast<size_t>(ev.train)];
      double alighted = 0;
      for (size_t i = 0; i < groups.size();) {
        OnboardGroup& grp = groups[i];
        const ODPair& od = instance.od_pairs[static_cast<size_t>(grp.k)];
        const auto& segs = index.segments(od.routes[static_cast<size_t>(grp.p)]);
        if (segs[static_cast<size_t>(grp.seg)].alight_pos != ev.pos) {
          ++i;
          continue;
        }
        alighted += grp.count;
        onboard_count[static_cast<size_t>(ev.line)][static_cast<size_t>(ev.train)] -= grp.count;
        onboard_total -= grp.count;
        if (grp.seg + 1 == static_cast<int>(segs.size())) {
          arrived += grp.count;
        } else {
          const SegmentGeometry& next = segs[static_cast<size_t>(grp.seg + 1)];
          auto con = index.next_connection(station, ev.time, next.line);
          if (!con) {
            result.stranded.push_back({grp.k, grp.p, station, grp.count});
            stranded_total += grp.count;
          } else {
            platform[static_cast<size_t>(next.line)][static_cast<size_t>(next.board_pos)]
                .push_back({grp.k, grp.p, grp.seg + 1, *con, grp.count});
            platform_total += grp.count;
          }
        }
        groups[i] = groups.back();
        groups.pop_back();
      }
      if (options.event_trace)
        *options.event_trace << ev.time << ',' << ev.line << ',' << ev.train << ',' << station
                             << ",arrival,0,0," << alighted << ','
                             << onboard_count[static_cast<size_t>(ev.line)][static_cast<size_t>(ev.train)]
                             << '\n';
    } else {
      auto& waiting = platform[static_cast<size_t>(ev.line)][static_cast<size_t>(ev.pos)];
      std::vector<PlatformGroup> eligible;
      for (size_t i = 0; i < waiting.size();) {
        if (waiting[i].await <= ev.train) {
          eligible.push_back(waiting[i]);
          waiting[i] = waiting.back();
          waiting.pop_back();
        } else {
          ++i;
        }
      }
      std::sort(eligible.begin(), eligible.end(), group_key_less);
      // merge duplicates (carryover plus newcomers waiting for this train)
      std::vector<PlatformGroup> merged;
      for (const PlatformGroup& grp : eligible) {
        if (!merged.empty() && !group_key_less(merged.back(), grp) &&
            !group_key_less(grp, merged.back()))
          merged.back().count += grp.count;
        else
          merged.push_back(grp);
      }

      double boarded_sum = 0, denied_sum = 0;
      if (!merged.empty()) {
        std::vector<double> counts(merged.size());
        for (size_t i = 0; i < merged.size(); ++i) {
          counts[i] = merged[i].count;
          flow.g(merged[i].k, merged[i].p, merged[i].seg, ev.train) += merged[i].count;
        }
        const int cap = instance.trains(ev.line)[static_cast<size_t>(ev.train)].capacity;
        const double residual =
            cap - onboard_count[static_cast<size_t>(ev.line)][static_cast<size_t>(ev.train)];
        const std::vector<double> taken = board(counts, residual, q.mode);
        for (size_t i = 0; i < merged.size(); ++i) {
          const PlatformGroup& grp = merged[i];
          if (taken[i] > 0) {
            auto& train_groups = onboard[static_cast<size_t>(ev.line)][static_cast<size_t>(ev.train)];
            bool found = false;
            for (OnboardGroup& ob : train_groups) {
              if (ob.k == grp.k && ob.p == grp.p && ob.seg == grp.seg) {
                ob.count += taken[i];
                found = true;
                break;
              }
            }
            if (!found) train_groups.push_back({grp.k, grp.p, grp.seg, taken[i]});
            onboard_count[static_cast<size_t>(ev.line)][static_cast<size_t>(ev.train)] += taken[i];
            onboard_total += taken[i];
            platform_total -= taken[i];
            boarded_sum += taken[i];
          }
          const double denied = grp.count - taken[i];
          if (denied > (q.mode == AssignmentQ::Mode::kInteger ? 0.5 : kEps)) {
            denied_sum += denied;
            if (ev.train + 1 >= instance.train_count(ev.line)) {
              result.stranded.push_back({grp.k, grp.p, station, denied});
              stranded_total += denied;
              platform_total -= denied;
            } else {
              flow.db(grp.k, grp.p, grp.seg, ev.train + 1) += denied;
              waiting.push_back({grp.k, grp.p, grp.seg, ev.train + 1, denied});
            }
          } else if (denied > 0) {
            // continuous-mode dust: board it to keep conservation exact
            onboard[static_cast<size_t>(ev.line)][static_cast<size_t>(ev.train)]
                .push_back({grp.k, grp.p, grp.seg, denied});
            onboard_count[static_cast<size_t>(ev.line)][static_cast<size_t>(ev.train)] += denied;
            onboard_total += denied;
            platform_total -= denied;
          }
        }
      }
      // record per-leg flows for everyone leaving on this train
      double leg_total = 0;
      for (const OnboardGroup& grp :
           onboard[static_cast<size_t>(ev.line)][static_cast<size_t>(ev.train)]) {
        const ODPair& od = instance.od_pairs[static_cast<size_t>(grp.k)];
        const auto& segs = index.segments(od.routes[static_cast<size_t>(grp.p)]);
        const int leg_off = ev.pos - segs[static_cast<size_t>(grp.seg)].board_pos;
        flow.f(grp.k, grp.p, grp.seg, ev.train, leg_off) += grp.count;
        leg_total += grp.count;
      }
      flow.onboard(ev.line, ev.train, ev.pos) = leg_total;
      if (options.event_trace)
        *options.event_trace << ev.time << ',' << ev.line << ',' << ev.train << ',' << station
                             << ",departure," << boarded_sum << ',' << denied_sum << ",0,"
                             << leg_total << '\n';
    }
    if (options.audit) {
      const double tracked = platform_total + onboard_total + arrived + stranded_total;
      if (std::abs(tracked - placed) > kEps * std::max(1.0, placed)) result.audit_ok = false;
    }
  }

  // anyone still waiting never saw a departure at all
  for (size_t l = 0; l < platform.size(); ++l) {
    for (size_t pos = 0; pos < platform[l].size(); ++pos) {
      for (const PlatformGroup& grp : platform[l][pos]) {
        if (grp.count <= 0) continue;
        result.stranded.push_back(
            {grp.k, grp.p, instance.lines[l].stations[pos], grp.count});
      }
    }
  }

  result.feasible = result.stranded.empty();
  return result;
}

std::vector<Violation> check_feasibility(const ScheduleIndex& index, const FlowState& flow,
                                         const AssignmentQ& q) {
  const TransitInstance& instance = index.instance();
  std::vector<Violation> out;
  auto add = [&out](std::string entity, std::string rule, std::string detail) {
    out.push_back({std::move(entity), std::move(rule), std::move(detail)});
  };

  // capacity per (line, train, leg), recomputed from f
  std::vector<std::vector<double>> leg_totals(instance.lines.size());
  for (size_t l = 0; l < instance.lines.size(); ++l)
    leg_totals[l].assign(static_cast<size_t>(instance.train_count(static_cast<LineId>(l))) *
                             instance.lines[l].leg_durations.size(),
                         0.0);

  for (const ODPair& od : instance.od_pairs) {
    const OdId k = od.id;
    double dep_total = 0, arr_total = 0, q_total = 0;
    for (size_t p = 0; p < od.routes.size(); ++p) {
      const RouteId r = od.routes[p];
      const auto& segs = index.segments(r);
      const Route& route = instance.route(r);
      for (size_t s = 0; s < segs.size(); ++s) {
        const int trains = instance.train_count(segs[s].line);
        const int legs = segs[s].alight_pos - segs[s].board_pos;
        const size_t n_line_legs = instance.lines[static_cast<size_t>(segs[s].line)].leg_durations.size();
        for (int t = 0; t < trains; ++t) {
          const double first = flow.f(k, static_cast<int>(p), static_cast<int>(s), t, 0);
          for (int leg = 0; leg < legs; ++leg) {
            const double v = flow.f(k, static_cast<int>(p), static_cast<int>(s), t, leg);
            if (v < -kEps)
              add("od " + std::to_string(k), "negative-flow", "f < 0");
            leg_totals[static_cast<size_t>(segs[s].line)]
                      [static_cast<size_t>(t) * n_line_legs +
                       static_cast<size_t>(segs[s].board_pos + leg)] += v;
            if (std::abs(v - first) > kEps)
              add("od " + std::to_string(k) + " route " + std::to_string(r),
                  "continuity", "train " + std::to_string(t) + " segment " + std::to_string(s));
          }
          const double waiting = flow.g(k, static_cast<int>(p), static_cast<int>(s), t);
          if (waiting < -kEps || flow.db(k, static_cast<int>(p), static_cast<int>(s), t) < -kEps)
            add("od " + std::to_string(k), "negative-flow", "g or db < 0");
          if (first > waiting + kEps)
            add("od " + std::to_string(k) + " route " + std::to_string(r), "overboarding",
                "train " + std::to_string(t) + " boards more than waited");
        }
        if (flow.db(k, static_cast<int>(p), static_cast<int>(s), 0) > kEps)
          add("od " + std::to_string(k) + " route " + std::to_string(r), "db-boundary",
              "denied boarding recorded for first train");
        // waiting composition: g = q + db at origin, g = connected arrivals + db
        // at transfers
        for (int t = 0; t < trains; ++t) {
          double expected = flow.db(k, static_cast<int>(p), static_cast<int>(s), t);
          if (s == 0) {
            expected += q.values[static_cast<size_t>(k)][p][static_cast<size_t>(t)];
          } else {
            const auto& prev = segs[s - 1];
            const int prev_trains = instance.train_count(prev.line);
            const int prev_last_leg = prev.alight_pos - prev.board_pos - 1;
            for (int t1 = 0; t1 < prev_trains; ++t1) {
              const double arriving =
                  flow.f(k, static_cast<int>(p), static_cast<int>(s - 1), t1, prev_last_leg);
              if (arriving <= 0) continue;
              auto con = index.next_connection(route.segments[s].board,
                                               index.arrival_time(prev.line, t1, prev.alight_pos),
                                               segs[s].line);
              if (con && *con == t) expected += arriving;
            }
          }
          if (std::abs(flow.g(k, static_cast<int>(p), static_cast<int>(s), t) - expected) > 1e-4)
            add("od " + std::to_string(k) + " route " + std::to_string(r), "phantom-wait",
                "segment " + std::to_string(s) + " train " + std::to_string(t) +
                    " waiting does not match sources");
        }
      }
      const auto& per_train = q.values[static_cast<size_t>(k)][p];
      for (double v : per_train) q_total += v;
      const int first_trains = instance.train_count(segs.front().line);
      for (int t = 0; t < first_trains; ++t)
        dep_total += flow.f(k, static_cast<int>(p), 0, t, 0);
      const int last_seg = static_cast<int>(segs.size()) - 1;
      const int last_leg = segs.back().alight_pos - segs.back().board_pos - 1;
      const int last_trains = instance.train_count(segs.back().line);
      for (int t = 0; t < last_trains; ++t)
        arr_total += flow.f(k, static_cast<int>(p), last_seg, t, last_leg);
    }
    const double demand = static_cast<double>(od.demand);
    if (std::abs(q_total - demand) > kEps * std::max(1.0, demand))
      add("od " + std::to_string(k), "conservation", "assignment total != demand");
    if (std::abs(dep_total - demand) > kEps * std::max(1.0, demand))
      add("od " + std::to_string(k), "conservation", "departures != demand");
    if (std::abs(arr_total - demand) > kEps * std::max(1.0, demand))
      add("od " + std::to_string(k), "conservation", "arrivals != demand");
  }

  for (size_t l = 0; l < instance.lines.size(); ++l) {
    const size_t n_legs = instance.lines[l].leg_durations.size();
    for (int t = 0; t < instance.train_count(static_cast<LineId>(l)); ++t) {
      const int cap = instance.trains(static_cast<LineId>(l))[static_cast<size_t>(t)].capacity;
      for (size_t leg = 0; leg < n_legs; ++leg) {
        const double v = leg_totals[l][static_cast<size_t>(t) * n_legs + leg];
        if (v > cap + kEps)
          add("line " + std::to_string(l) + " train " + std::to_string(t), "capacity",
              "leg " + std::to_string(leg) + " load " + std::to_string(v) + " > " +
                  std::to_string(cap));
      }
    }
  }

  return out;
}

}  // namespace transit
