#include "transit/options.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace transit {

namespace {

constexpr double kMassEps = 1e-9;

void attribute_od(const ScheduleIndex& index, const AssignmentQ& q, const FlowState& flow,
                  OdId k, std::vector<std::vector<OptionEntry>>& od_entries, double& star,
                  int& valid_count) {
  const TransitInstance& instance = index.instance();
  const ODPair& od = instance.od(k);
  const CostParams& cp = instance.cost_params;
  od_entries.resize(od.routes.size());
  star = std::numeric_limits<double>::infinity();
  valid_count = 0;

  for (size_t p = 0; p < od.routes.size(); ++p) {
    const RouteId r = od.routes[p];
    const auto& segs = index.segments(r);
    const int trains = index.option_train_count(r);
    auto& entries = od_entries[p];
    entries.assign(static_cast<size_t>(trains), OptionEntry{});

    const Minutes ride = index.route_ride_time(r);
    const int last_seg = static_cast<int>(segs.size()) - 1;
    const int last_leg = segs.back().alight_pos - segs.back().board_pos - 1;
    const int arr_trains = instance.train_count(segs.back().line);

    for (int t = 0; t < trains; ++t) {
      OptionEntry& e = entries[static_cast<size_t>(t)];
      e.valid = index.chain(r, t).valid;
      e.q = q.at(k, static_cast<int>(p), t);
      if (e.valid) {
        e.avc0 = index.free_flow_cost(k, t, r);
        ++valid_count;
      } else if (e.q > kMassEps) {
        throw std::logic_error("positive assignment on an unservable option");
      }
    }

    // FIFO coupling of departure mass to arrival mass.
    int aj = 0;
    double arem = aj < arr_trains ? flow.f(k, static_cast<int>(p), last_seg, aj, last_leg) : 0;
    for (int t = 0; t < trains; ++t) {
      OptionEntry& e = entries[static_cast<size_t>(t)];
      double orem = e.q;
      if (orem <= kMassEps) {
        if (e.valid) e.avc = e.avc0;
        continue;
      }
      const Minutes dep = index.departure_time(segs.front().line, t, segs.front().board_pos);
      double cost_sum = 0;
      while (orem > kMassEps) {
        bool exhausted = false;
        while (arem <= kMassEps) {
          ++aj;
          if (aj >= arr_trains) {
            exhausted = true;
            break;
          }
          arem = flow.f(k, static_cast<int>(p), last_seg, aj, last_leg);
        }
        if (exhausted) {
          if (orem <= 1e-6) break;  // continuous-mode rounding dust
          throw std::logic_error("arrival flow does not cover departures (od " +
                                 std::to_string(k) + ")");
        }
        const double m = std::min(orem, arem);
        const Minutes arr = index.arrival_time(segs.back().line, aj, segs.back().alight_pos);
        const double wait = static_cast<double>(arr - dep - ride);
        const double c = cp.in_vehicle_per_min() * ride + cp.wait_per_min() * wait +
                         cp.early_per_min() * std::max(0, cp.target_arrival - arr) +
                         cp.late_per_min() * std::max(0, arr - cp.target_arrival);
        e.chunks.push_back({aj, m, c});
        cost_sum += m * c;
        orem -= m;
        arem -= m;
      }
      e.avc = cost_sum / e.q;
    }

    for (const OptionEntry& e : entries)
      if (e.valid) star = std::min(star, e.avc);
  }
}

}  // namespace

OptionCostTable attribute_costs(const ScheduleIndex& index, const AssignmentQ& q,
                                const FlowState& flow, Exec exec) {
  const int n = static_cast<int>(index.instance().od_pairs.size());
  OptionCostTable table;
  table.entries.resize(static_cast<size_t>(n));
  table.avc_star.assign(static_cast<size_t>(n), 0.0);
  table.valid_options.assign(static_cast<size_t>(n), 0);

  if (exec == Exec::kParallel) {
    std::string error;
#pragma omp parallel for schedule(static)
    for (int k = 0; k < n; ++k) {
      try {
        attribute_od(index, q, flow, k, table.entries[static_cast<size_t>(k)],
                     table.avc_star[static_cast<size_t>(k)],
                     table.valid_options[static_cast<size_t>(k)]);
      } catch (const std::exception& e) {
#pragma omp critical
        error = e.what();
      }
    }
    if (!error.empty()) throw std::logic_error(error);
  } else {
    for (int k = 0; k < n; ++k)
      attribute_od(index, q, flow, k, table.entries[static_cast<size_t>(k)],
                   table.avc_star[static_cast<size_t>(k)],
                   table.valid_options[static_cast<size_t>(k)]);
  }
  return table;
}

double ue_gap(const OptionCostTable& table, const AssignmentQ& q) {
  double gap = 0;
  for (size_t k = 0; k < table.entries.size(); ++k) {
    const double star = table.avc_star[k];
    for (size_t p = 0; p < table.entries[k].size(); ++p) {
      const auto& entries = table.entries[k][p];
      for (size_t t = 0; t < entries.size(); ++t) {
        const double flow_q = q.at(static_cast<OdId>(k), static_cast<int>(p), static_cast<int>(t));
        if (flow_q > 0 && entries[t].valid) gap += (entries[t].avc - star) * flow_q;
      }
    }
  }
  return gap;
}

OptionRef best_option(const OptionCostTable& table, OdId k) {
  const auto& od_entries = table.entries[static_cast<size_t>(k)];
  OptionRef best{-1, -1};
  double best_cost = std::numeric_limits<double>::infinity();
  for (size_t p = 0; p < od_entries.size(); ++p) {
    for (size_t t = 0; t < od_entries[p].size(); ++t) {
      const OptionEntry& e = od_entries[p][t];
      if (!e.valid) continue;
      const OptionRef ref{static_cast<int>(p), static_cast<int>(t)};
      if (e.avc < best_cost || (e.avc == best_cost && ref < best)) {
        best_cost = e.avc;
        best = ref;
      }
    }
  }
  if (best.route_pos < 0) throw FeasibilityError("od " + std::to_string(k) + " has no valid option");
  return best;
}

AssignmentQ direction(const ScheduleIndex& index, const OptionCostTable& table,
                      const AssignmentQ& q) {
  AssignmentQ v = AssignmentQ::zeros(index, q.mode);
  for (OdId k = 0; k < static_cast<OdId>(table.entries.size()); ++k) {
    const OptionRef best = best_option(table, k);
    v.at(k, best.route_pos, best.train) = static_cast<double>(index.instance().od(k).demand);
  }
  return v;
}

}  // namespace transit
