#include "transit/instance_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace transit {

using nlohmann::json;

TransitInstance instance_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("instance JSON parse error: ") + e.what());
  }
  try {
    TransitInstance instance;
    instance.name = doc.value("name", "");
    for (const auto& s : doc.at("stations"))
      instance.stations.push_back({s.at("id").get<StationId>(), s.value("name", "")});
    for (const auto& l : doc.at("lines")) {
      Line line;
      line.id = l.at("id").get<LineId>();
      line.name = l.value("name", "");
      line.stations = l.at("stations").get<std::vector<StationId>>();
      line.leg_durations = l.at("leg_durations").get<std::vector<Minutes>>();
      instance.lines.push_back(std::move(line));
    }
    instance.trains_by_line.resize(instance.lines.size());
    for (const auto& t : doc.at("trains")) {
      const LineId line = t.at("line").get<LineId>();
      if (line < 0 || line >= static_cast<LineId>(instance.lines.size()))
        throw IoError("trains section references unknown line " + std::to_string(line));
      const auto starts = t.at("start_times").get<std::vector<Minutes>>();
      std::vector<int> caps;
      if (t.contains("capacities"))
        caps = t.at("capacities").get<std::vector<int>>();
      else
        caps.assign(starts.size(), t.at("capacity").get<int>());
      if (caps.size() != starts.size())
        throw IoError("capacities length mismatch on line " + std::to_string(line));
      auto& trains = instance.trains_by_line[static_cast<size_t>(line)];
      for (size_t n = 0; n < starts.size(); ++n)
        trains.push_back({line, static_cast<int>(n), starts[n], caps[n]});
    }
    for (const auto& k : doc.at("od_pairs")) {
      ODPair od;
      od.id = static_cast<OdId>(instance.od_pairs.size());
      od.origin = k.at("origin").get<StationId>();
      od.destination = k.at("destination").get<StationId>();
      od.demand = k.at("demand").get<long>();
      instance.od_pairs.push_back(od);
    }
    for (const auto& r : doc.at("routes")) {
      Route route;
      route.id = static_cast<RouteId>(instance.routes.size());
      route.od = r.at("od").get<OdId>();
      route.group = r.value("group", "base");
      for (const auto& seg : r.at("segments")) {
        if (!seg.is_array() || seg.size() != 3)
          throw IoError("route segment must be a [line, board, alight] triple");
        route.segments.push_back({seg[0].get<LineId>(), seg[1].get<StationId>(),
                                  seg[2].get<StationId>()});
      }
      if (route.od < 0 || route.od >= static_cast<OdId>(instance.od_pairs.size()))
        throw IoError("route references unknown od " + std::to_string(route.od));
      instance.od_pairs[static_cast<size_t>(route.od)].routes.push_back(route.id);
      instance.routes.push_back(std::move(route));
    }
    const auto& cp = doc.at("cost_params");
    instance.cost_params.in_vehicle_per_hour = cp.at("in_vehicle_per_hour").get<double>();
    instance.cost_params.wait_per_hour = cp.at("wait_per_hour").get<double>();
    instance.cost_params.early_per_hour = cp.at("early_per_hour").get<double>();
    instance.cost_params.late_per_hour = cp.at("late_per_hour").get<double>();
    instance.cost_params.target_arrival = cp.at("target_arrival").get<Minutes>();
    return instance;
  } catch (const json::exception& e) {
    throw IoError(std::string("instance JSON shape error: ") + e.what());
  }
}

std::string instance_to_json(const TransitInstance& instance) {
  json doc;
  doc["name"] = instance.name;
  doc["stations"] = json::array();
  for (const auto& s : instance.stations) doc["stations"].push_back({{"id", s.id}, {"name", s.name}});
  doc["lines"] = json::array();
  for (const auto& l : instance.lines)
    doc["lines"].push_back({{"id", l.id},
                            {"name", l.name},
                            {"stations", l.stations},
                            {"leg_durations", l.leg_durations}});
  doc["trains"] = json::array();
  for (size_t l = 0; l < instance.trains_by_line.size(); ++l) {
    const auto& trains = instance.trains_by_line[l];
    if (trains.empty()) continue;
    json entry;
    entry["line"] = static_cast<LineId>(l);
    std::vector<Minutes> starts;
    std::vector<int> caps;
    for (const auto& t : trains) {
      starts.push_back(t.start_time);
      caps.push_back(t.capacity);
    }
    entry["start_times"] = starts;
    const bool uniform = std::all_of(caps.begin(), caps.end(),
                                     [&caps](int c) { return c == caps.front(); });
    if (uniform)
      entry["capacity"] = caps.front();
    else
      entry["capacities"] = caps;
    doc["trains"].push_back(entry);
  }
  doc["od_pairs"] = json::array();
  for (const auto& k : instance.od_pairs)
    doc["od_pairs"].push_back(
        {{"origin", k.origin}, {"destination", k.destination}, {"demand", k.demand}});
  doc["routes"] = json::array();
  for (const auto& r : instance.routes) {
    json segs = json::array();
    for (const auto& s : r.segments) segs.push_back({s.line, s.board, s.alight});
    doc["routes"].push_back({{"od", r.od}, {"group", r.group}, {"segments", segs}});
  }
  doc["cost_params"] = {{"in_vehicle_per_hour", instance.cost_params.in_vehicle_per_hour},
                        {"wait_per_hour", instance.cost_params.wait_per_hour},
                        {"early_per_hour", instance.cost_params.early_per_hour},
                        {"late_per_hour", instance.cost_params.late_per_hour},
                        {"target_arrival", instance.cost_params.target_arrival}};
  return doc.dump(2) + "\n";
}

TransitInstance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open instance file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str());
}

void write_instance_file(const TransitInstance& instance, const std::string& path) {
  write_text_atomic(path, instance_to_json(instance));
}

void load_demand_csv(TransitInstance& instance, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open demand CSV: " + path);
  std::map<std::pair<StationId, StationId>, OdId> by_endpoints;
  for (const auto& od : instance.od_pairs) by_endpoints[{od.origin, od.destination}] = od.id;
  for (auto& od : instance.od_pairs) od.demand = 0;
  std::string row;
  int line_no = 0;
  while (std::getline(in, row)) {
    ++line_no;
    if (row.empty()) continue;
    if (line_no == 1 && row.find("origin") != std::string::npos) continue;  // header
    std::stringstream ss(row);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
      throw IoError("demand CSV row " + std::to_string(line_no) + " malformed");
    const auto it = by_endpoints.find({std::stoi(a), std::stoi(b)});
    if (it == by_endpoints.end())
      throw IoError("demand CSV row " + std::to_string(line_no) + " names unknown OD pair");
    instance.od_pairs[static_cast<size_t>(it->second)].demand = std::stol(c);
  }
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    if (!out) throw IoError("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace transit
