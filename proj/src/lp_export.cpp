#include <cmath>
#include <cstdio>
#include <sstream>

#include "qpbound/lp.hpp"

namespace qpbound::lp {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// "x", "2.5 x" as leading term; " + x" / " - 2.5 x" as continuation.
void append_term(std::string& out, bool first, double coef, const std::string& name) {
  double mag = std::abs(coef);
  std::string magstr = mag == 1.0 ? "" : num(mag) + " ";
  if (first) {
    out += (coef < 0 ? "-" : "") + magstr + name;
  } else {
    out += coef < 0 ? " - " : " + ";
    out += magstr + name;
  }
}

}  // namespace

std::string export_lp_text(const LinearProgram& lp) {
  std::ostringstream os;
  os << "\\ generated by qpbound\n";
  if (lp.objective_constant != 0.0)
    os << "\\ objective_constant " << num(lp.objective_constant) << "\n";
  os << (lp.maximize ? "Maximize" : "Minimize") << "\n obj:";
  if (lp.objective.empty()) {
    os << " 0 " << (lp.variables.empty() ? "x0" : lp.variables[0].name);
  } else {
    std::string body;
    bool first = true;
    for (const auto& [j, cj] : lp.objective) {
      append_term(body, first, cj, lp.variables[j].name);
      first = false;
    }
    os << " " << body;
  }
  os << "\nSubject To\n";
  for (size_t i = 0; i < lp.constraints.size(); ++i) {
    const auto& c = lp.constraints[i];
    std::string body;
    bool first = true;
    for (const auto& [j, aij] : c.row) {
      append_term(body, first, aij, lp.variables[j].name);
      first = false;
    }
    if (first) body = "0 " + (lp.variables.empty() ? std::string("x0") : lp.variables[0].name);
    const char* rel = c.rel == Relation::LessEq   ? "<="
                      : c.rel == Relation::GreaterEq ? ">="
                                                     : "=";
    os << " c" << (i + 1) << ": " << body << " " << rel << " " << num(c.rhs)
       << "\n";
  }
  os << "Bounds\n";
  for (const auto& v : lp.variables) {
    if (v.lower.has_value())
      os << " " << v.name << " >= " << num(*v.lower) << "\n";
    else
      os << " " << v.name << " free\n";
  }
  os << "End\n";
  return os.str();
}

}  // namespace qpbound::lp
