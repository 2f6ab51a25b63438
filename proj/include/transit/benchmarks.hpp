#pragma once

#include <string>

#include "transit/types.hpp"

namespace transit {

// Bundled benchmark instances.
//   hk-lite    five-line morning-peak network, 12 OD pairs, 52,717 passengers,
//              capacity 2600; route groups "base" and "extended"
//   toy-1line  one line, two trains of capacity 2, one OD of 3 passengers
//   toy-2line  two lines with one transfer, small capacities, two ODs
// Schedules are synthetic uniform headways over 5:50-10:00 AM.
TransitInstance load_benchmark(const std::string& name);

}  // namespace transit
