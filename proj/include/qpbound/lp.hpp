#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qpbound/piecewise.hpp"

namespace qpbound::lp {

enum class Relation { LessEq, GreaterEq, Equal };

struct Constraint {
  std::map<int, double> row;
  Relation rel = Relation::GreaterEq;
  double rhs = 0;
};

struct LinearProgram {
  struct Variable {
    std::string name;
    std::optional<double> lower;  // no upper bounds needed here
  };

  std::vector<Variable> variables;
  std::vector<Constraint> constraints;
  std::map<int, double> objective;
  double objective_constant = 0;
  bool maximize = false;

  int add_variable(std::string name, std::optional<double> lower = std::nullopt);
  void add_constraint(Constraint c);
  // expr >= 0 (or <= 0) as a constraint row; the expression's constant
  // moves to the right-hand side.
  void add_inequality(const AffineExpr& expr, Relation rel);
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

std::string to_string(SolveStatus s);

struct Solution {
  SolveStatus status = SolveStatus::NumericalFailure;
  std::vector<double> values;  // one per variable when Optimal
  double objective = 0;        // includes the objective constant
  double phase1_objective = 0; // infeasibility certificate when > tolerance
  long iterations = 0;
  std::string diagnostics;
};

// Two-phase dense revised simplex, Dantzig pricing with a Bland anti-cycling
// fallback; deterministic for identical inputs.
Solution solve(const LinearProgram& lp);

// CPLEX-style LP text: objective, rows named c1..cm, bounds section.
std::string export_lp_text(const LinearProgram& lp);

}  // namespace qpbound::lp
