#include "transit/model_ir.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace transit {

namespace {

std::string num(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void append_terms(std::string& out, const std::vector<LinearTerm>& terms,
                  const std::vector<ModelVar>& vars) {
  bool first = true;
  for (const LinearTerm& term : terms) {
    if (term.coef == 0) continue;
    const double mag = std::abs(term.coef);
    if (first) {
      out += term.coef < 0 ? "- " : "";
      first = false;
    } else {
      out += term.coef < 0 ? " - " : " + ";
    }
    if (mag != 1.0) {
      out += num(mag);
      out += ' ';
    }
    out += vars[static_cast<size_t>(term.var)].name;
  }
  if (first) out += "0 zero_pad";  // degenerate empty expression
}

}  // namespace

int ModelIR::add_var(const std::string& name, double lb, double ub, bool integer) {
  const int id = static_cast<int>(vars.size());
  vars.push_back({name, lb, ub, integer});
  var_index.emplace(name, id);
  return id;
}

int ModelIR::var(const std::string& name) const {
  auto it = var_index.find(name);
  return it == var_index.end() ? -1 : it->second;
}

std::string write_lp(const ModelIR& model) {
  std::string out;
  out += "\\Problem name: " + model.name + "\n\nMinimize\n obj: ";
  if (model.objective.empty())
    out += "0";
  else
    append_terms(out, model.objective, model.vars);
  out += "\nSubject To\n";
  for (const LinearConstraint& con : model.constraints) {
    out += ' ' + con.name + ": ";
    append_terms(out, con.terms, model.vars);
    switch (con.rel) {
      case Relation::kLe: out += " <= "; break;
      case Relation::kGe: out += " >= "; break;
      case Relation::kEq: out += " = "; break;
    }
    out += num(con.rhs) + "\n";
  }
  out += "Bounds\n";
  for (const ModelVar& v : model.vars)
    out += ' ' + num(v.lb) + " <= " + v.name + " <= " + num(v.ub) + "\n";
  std::string generals;
  for (const ModelVar& v : model.vars)
    if (v.integer) generals += ' ' + v.name + "\n";
  if (!generals.empty()) out += "Generals\n" + generals;
  out += "End\n";
  return out;
}

std::string write_mps(const ModelIR& model) {
  std::string out = "NAME " + model.name + "\nROWS\n N obj\n";
  for (const LinearConstraint& con : model.constraints) {
    const char* kind = con.rel == Relation::kLe ? "L" : con.rel == Relation::kGe ? "G" : "E";
    out += std::string(" ") + kind + " " + con.name + "\n";
  }
  // column-major terms, grouped per variable in declaration order
  std::vector<std::vector<std::pair<std::string, double>>> columns(model.vars.size());
  for (const LinearTerm& term : model.objective)
    columns[static_cast<size_t>(term.var)].push_back({"obj", term.coef});
  for (const LinearConstraint& con : model.constraints)
    for (const LinearTerm& term : con.terms)
      if (term.coef != 0) columns[static_cast<size_t>(term.var)].push_back({con.name, term.coef});
  out += "COLUMNS\n";
  bool in_integer = false;
  for (size_t i = 0; i < model.vars.size(); ++i) {
    const ModelVar& v = model.vars[i];
    if (v.integer && !in_integer) {
      out += " MARKER INT1 'MARKER' 'INTORG'\n";
      in_integer = true;
    } else if (!v.integer && in_integer) {
      out += " MARKER INT0 'MARKER' 'INTEND'\n";
      in_integer = false;
    }
    for (const auto& [row, coef] : columns[i]) out += ' ' + v.name + ' ' + row + ' ' + num(coef) + "\n";
    if (columns[i].empty()) out += ' ' + v.name + " obj 0\n";
  }
  if (in_integer) out += " MARKER INT0 'MARKER' 'INTEND'\n";
  out += "RHS\n";
  for (const LinearConstraint& con : model.constraints)
    if (con.rhs != 0) out += " rhs " + con.name + ' ' + num(con.rhs) + "\n";
  out += "BOUNDS\n";
  for (const ModelVar& v : model.vars) {
    out += " LO bnd " + v.name + ' ' + num(v.lb) + "\n";
    out += " UP bnd " + v.name + ' ' + num(v.ub) + "\n";
  }
  out += "ENDATA\n";
  return out;
}

ModelIR parse_lp(const std::string& text) {
  ModelIR model;
  std::istringstream in(text);
  std::string line;
  enum Section { kNone, kObjective, kConstraints, kBounds, kGenerals, kEnd } section = kNone;
  std::string pending;  // objective or constraint text accumulates here
  std::vector<std::pair<std::string, std::string>> raw_constraints;
  std::string raw_objective;
  std::vector<std::string> generals;
  std::vector<std::tuple<double, std::string, double>> bounds;

  auto flush_pending = [&](const std::string& upcoming_section) {
    (void)upcoming_section;
    if (pending.empty()) return;
    const auto colon = pending.find(':');
    if (section == kObjective) {
      raw_objective = colon == std::string::npos ? pending : pending.substr(colon + 1);
    } else if (section == kConstraints) {
      if (colon == std::string::npos) throw std::runtime_error("LP constraint missing name");
      std::string name = pending.substr(0, colon);
      name.erase(0, name.find_first_not_of(" \t"));
      name.erase(name.find_last_not_of(" \t") + 1);
      raw_constraints.push_back({name, pending.substr(colon + 1)});
    }
    pending.clear();
  };

  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '\\') continue;
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
    trimmed.erase(trimmed.find_last_not_of(" \t\r") + 1);
    if (trimmed.empty()) continue;
    std::string lower = trimmed;
    for (char& c : lower) c = static_cast<char>(std::tolower(c));
    if (lower == "minimize" || lower == "min") {
      flush_pending(lower);
      section = kObjective;
      continue;
    }
    if (lower == "subject to" || lower == "st" || lower == "s.t.") {
      flush_pending(lower);
      section = kConstraints;
      continue;
    }
    if (lower == "bounds") {
      flush_pending(lower);
      section = kBounds;
      continue;
    }
    if (lower == "generals" || lower == "general" || lower == "integers") {
      flush_pending(lower);
      section = kGenerals;
      continue;
    }
    if (lower == "end") {
      flush_pending(lower);
      section = kEnd;
      break;
    }
    if (section == kObjective || section == kConstraints) {
      // a new named row starts; otherwise it continues the previous line
      if (section == kConstraints && trimmed.find(':') != std::string::npos) flush_pending("");
      pending += ' ' + trimmed;
    } else if (section == kBounds) {
      // form: lb <= name <= ub
      std::istringstream bs(trimmed);
      std::string lb_s, le1, name, le2, ub_s;
      if (!(bs >> lb_s >> le1 >> name >> le2 >> ub_s) || le1 != "<=" || le2 != "<=")
        throw std::runtime_error("unsupported LP bound line: " + trimmed);
      bounds.push_back({std::stod(lb_s), name, std::stod(ub_s)});
    } else if (section == kGenerals) {
      std::istringstream gs(trimmed);
      std::string name;
      while (gs >> name) generals.push_back(name);
    }
  }

  auto ensure_var = [&model](const std::string& name) {
    const int existing = model.var(name);
    if (existing >= 0) return existing;
    return model.add_var(name, 0, std::numeric_limits<double>::infinity(), false);
  };

  auto parse_expr = [&](const std::string& expr) {
    std::vector<LinearTerm> terms;
    std::istringstream ts(expr);
    std::string tok;
    double sign = 1.0;
    double coef = 1.0;
    bool have_coef = false;
    while (ts >> tok) {
      if (tok == "+") {
        sign = 1.0;
        continue;
      }
      if (tok == "-") {
        sign = -1.0;
        continue;
      }
      char* end = nullptr;
      const double value = std::strtod(tok.c_str(), &end);
      if (end && *end == '\0') {
        coef = value;
        have_coef = true;
        continue;
      }
      const double full = sign * (have_coef ? coef : 1.0);
      if (!(tok == "zero_pad" && full == 0))
        terms.push_back({ensure_var(tok), full});
      sign = 1.0;
      coef = 1.0;
      have_coef = false;
    }
    return terms;
  };

  model.objective = parse_expr(raw_objective);
  for (auto& [name, body] : raw_constraints) {
    LinearConstraint con;
    con.name = name;
    std::string expr = body;
    size_t pos;
    if ((pos = expr.find("<=")) != std::string::npos)
      con.rel = Relation::kLe;
    else if ((pos = expr.find(">=")) != std::string::npos)
      con.rel = Relation::kGe;
    else if ((pos = expr.find('=')) != std::string::npos)
      con.rel = Relation::kEq;
    else
      throw std::runtime_error("LP constraint missing relation: " + name);
    const size_t skip = con.rel == Relation::kEq ? 1 : 2;
    con.rhs = std::stod(expr.substr(pos + skip));
    con.terms = parse_expr(expr.substr(0, pos));
    model.constraints.push_back(std::move(con));
  }
  for (const auto& [lb, name, ub] : bounds) {
    const int v = ensure_var(name);
    model.vars[static_cast<size_t>(v)].lb = lb;
    model.vars[static_cast<size_t>(v)].ub = ub;
  }
  for (const std::string& name : generals)
    model.vars[static_cast<size_t>(ensure_var(name))].integer = true;
  return model;
}

}  // namespace transit
