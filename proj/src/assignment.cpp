#include "transit/assignment.hpp"

#include <algorithm>
#include <cmath>

namespace transit {

AssignmentQ AssignmentQ::zeros(const ScheduleIndex& index, Mode mode) {
  const TransitInstance& instance = index.instance();
  AssignmentQ q;
  q.mode = mode;
  q.values.resize(instance.od_pairs.size());
  for (const ODPair& od : instance.od_pairs) {
    auto& block = q.values[static_cast<size_t>(od.id)];
    block.resize(od.routes.size());
    for (size_t p = 0; p < od.routes.size(); ++p) {
      const RouteId r = od.routes[p];
      block[p].assign(static_cast<size_t>(index.option_train_count(r)), 0.0);
    }
  }
  return q;
}

double AssignmentQ::od_total(OdId k) const {
  double total = 0;
  for (const auto& per_route : values[static_cast<size_t>(k)])
    for (double v : per_route) total += v;
  return total;
}

AssignmentQ AssignmentQ::rounded(const ScheduleIndex& index) const {
  AssignmentQ out = *this;
  out.mode = Mode::kInteger;
  for (OdId k = 0; k < static_cast<OdId>(values.size()); ++k) {
    auto& block = out.values[static_cast<size_t>(k)];
    long long target = std::llround(od_total(k));
    long long floored = 0;
    std::vector<std::pair<double, OptionRef>> remainders;
    for (size_t p = 0; p < block.size(); ++p) {
      for (size_t t = 0; t < block[p].size(); ++t) {
        const double v = block[p][t];
        const double fl = std::floor(v + 1e-9);
        block[p][t] = fl;
        floored += static_cast<long long>(fl);
        remainders.push_back({v - fl, {static_cast<int>(p), static_cast<int>(t)}});
      }
    }
    long long leftover = target - floored;
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) {
                       if (a.first != b.first) return a.first > b.first;
                       return a.second < b.second;
                     });
    for (const auto& [rem, ref] : remainders) {
      if (leftover <= 0) break;
      block[static_cast<size_t>(ref.route_pos)][static_cast<size_t>(ref.train)] += 1.0;
      --leftover;
    }
  }
  (void)index;
  return out;
}

}  // namespace transit
