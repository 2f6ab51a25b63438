#pragma once

#include <map>
#include <string>
#include <vector>

#include "transit/types.hpp"

namespace transit {

struct ModelVar {
  std::string name;
  double lb = 0;
  double ub = 0;
  bool integer = false;
};

struct LinearTerm {
  int var = 0;
  double coef = 0;
};

enum class Relation { kLe, kGe, kEq };

struct LinearConstraint {
  std::string name;
  std::vector<LinearTerm> terms;
  Relation rel = Relation::kEq;
  double rhs = 0;
};

// Solver-agnostic integer-linear program, minimized. Variable names double
// as semantic keys (q_k_t_r, f_k_r_t_e).
struct ModelIR {
  std::string name = "transit_so";
  std::vector<ModelVar> vars;
  std::vector<LinearConstraint> constraints;
  std::vector<LinearTerm> objective;
  std::map<std::string, int> var_index;

  int add_var(const std::string& name, double lb, double ub, bool integer);
  int var(const std::string& name) const;  // -1 when absent
};

// Deterministic CPLEX-style LP text; variables appear in declaration order.
std::string write_lp(const ModelIR& model);
// Free MPS with explicit bounds on every variable.
std::string write_mps(const ModelIR& model);

// Parses the LP subset produced by write_lp (used for round-trip checks).
ModelIR parse_lp(const std::string& text);

}  // namespace transit
