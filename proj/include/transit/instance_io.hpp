#pragma once

#include <stdexcept>
#include <string>

#include "transit/types.hpp"

namespace transit {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Instance files are a single JSON document with sections `stations`,
// `lines`, `trains`, `od_pairs`, `routes` and `cost_params`. Writing is
// canonical (sorted keys, 2-space indent) so write(load(x)) == x.
TransitInstance instance_from_json(const std::string& text);
std::string instance_to_json(const TransitInstance& instance);

TransitInstance load_instance_file(const std::string& path);
void write_instance_file(const TransitInstance& instance, const std::string& path);

// Replaces OD demand counts from CSV rows `origin,destination,count`.
// Unknown OD pairs are an error; pairs absent from the CSV keep demand 0.
void load_demand_csv(TransitInstance& instance, const std::string& path);

// Atomic text write: temp file in the target directory, then rename.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace transit
