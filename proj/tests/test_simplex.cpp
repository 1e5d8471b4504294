#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qpbound/lp.hpp"

using namespace qpbound;
using namespace qpbound::lp;

namespace {

Constraint row(std::map<int, double> r, Relation rel, double rhs) {
  return Constraint{std::move(r), rel, rhs};
}

}  // namespace

TEST_CASE("one variable") {
  LinearProgram p;
  int x = p.add_variable("x");
  p.objective[x] = 1;
  p.add_constraint(row({{x, 1}}, Relation::GreaterEq, 3));
  Solution s = solve(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.values[x] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(s.objective == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("infeasible certificate") {
  LinearProgram p;
  int x = p.add_variable("x");
  p.objective[x] = 1;
  p.add_constraint(row({{x, 1}}, Relation::GreaterEq, 1));
  p.add_constraint(row({{x, 1}}, Relation::LessEq, 0));
  Solution s = solve(p);
  CHECK(s.status == SolveStatus::Infeasible);
  CHECK(s.phase1_objective > 1e-9);
  CHECK(s.diagnostics.find("phase-1") != std::string::npos);
}

TEST_CASE("two variables on the unit simplex") {
  // Vertices (0,0), (1,0), (0,1); the objective -x-y attains -1 on the edge.
  LinearProgram p;
  int x = p.add_variable("x", 0.0);
  int y = p.add_variable("y", 0.0);
  p.objective[x] = -1;
  p.objective[y] = -1;
  p.add_constraint(row({{x, 1}, {y, 1}}, Relation::LessEq, 1));
  Solution s = solve(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("unbounded") {
  LinearProgram p;
  int x = p.add_variable("x", 0.0);
  p.objective[x] = -1;
  Solution s = solve(p);
  CHECK(s.status == SolveStatus::Unbounded);
}

TEST_CASE("equalities and free variables") {
  LinearProgram p;
  int x = p.add_variable("x");
  int y = p.add_variable("y");
  p.objective[x] = 1;
  p.add_constraint(row({{x, 1}, {y, 1}}, Relation::Equal, 2));
  p.add_constraint(row({{x, 1}, {y, -1}}, Relation::Equal, 0));
  Solution s = solve(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.values[x] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(s.values[y] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("negative lower bounds and maximization") {
  LinearProgram p;
  int x = p.add_variable("x", -5.0);
  int y = p.add_variable("y", -1.0);
  p.maximize = true;
  p.objective[x] = 1;
  p.objective[y] = 2;
  p.add_constraint(row({{x, 1}, {y, 1}}, Relation::LessEq, 0));
  Solution s = solve(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  // Best: y as large as possible, x at its lower bound.
  CHECK(s.values[x] == doctest::Approx(-5.0).epsilon(1e-10));
  CHECK(s.values[y] == doctest::Approx(5.0).epsilon(1e-10));
  CHECK(s.objective == doctest::Approx(5.0).epsilon(1e-10));
}

TEST_CASE("identical input yields identical output") {
  LinearProgram p;
  int x = p.add_variable("x");
  int y = p.add_variable("y");
  p.objective[x] = 0.7;
  p.objective[y] = -0.3;
  p.add_constraint(row({{x, 2}, {y, 1}}, Relation::GreaterEq, 1));
  p.add_constraint(row({{x, -1}, {y, 1}}, Relation::LessEq, 4));
  p.add_constraint(row({{x, 1}}, Relation::LessEq, 10));
  p.add_constraint(row({{y, 1}}, Relation::LessEq, 10));
  p.add_constraint(row({{x, 1}}, Relation::GreaterEq, -10));
  p.add_constraint(row({{y, 1}}, Relation::GreaterEq, -10));
  Solution a = solve(p);
  Solution b = solve(p);
  REQUIRE(a.status == b.status);
  REQUIRE(a.values.size() == b.values.size());
  for (size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
  CHECK(a.objective == b.objective);
}

namespace {

// Exhaustive vertex enumeration for boxed two-variable programs.
struct Enumerated {
  bool feasible = false;
  double best = 0;
};

Enumerated enumerate(const LinearProgram& p) {
  std::vector<std::array<double, 3>> lines;  // a1 x + a2 y = b
  for (const auto& c : p.constraints) {
    double a1 = c.row.count(0) ? c.row.at(0) : 0;
    double a2 = c.row.count(1) ? c.row.at(1) : 0;
    lines.push_back({a1, a2, c.rhs});
  }
  auto feasible_at = [&](double x, double y) {
    for (const auto& c : p.constraints) {
      double a1 = c.row.count(0) ? c.row.at(0) : 0;
      double a2 = c.row.count(1) ? c.row.at(1) : 0;
      double lhs = a1 * x + a2 * y;
      if (c.rel == Relation::LessEq && lhs > c.rhs + 1e-9) return false;
      if (c.rel == Relation::GreaterEq && lhs < c.rhs - 1e-9) return false;
      if (c.rel == Relation::Equal && std::abs(lhs - c.rhs) > 1e-9) return false;
    }
    return true;
  };
  Enumerated out;
  double sense = p.maximize ? -1.0 : 1.0;
  for (size_t i = 0; i < lines.size(); ++i)
    for (size_t j = i + 1; j < lines.size(); ++j) {
      double det = lines[i][0] * lines[j][1] - lines[i][1] * lines[j][0];
      if (std::abs(det) < 1e-12) continue;
      double x = (lines[i][2] * lines[j][1] - lines[i][1] * lines[j][2]) / det;
      double y = (lines[i][0] * lines[j][2] - lines[i][2] * lines[j][0]) / det;
      if (!feasible_at(x, y)) continue;
      double c0 = p.objective.count(0) ? p.objective.at(0) : 0;
      double c1 = p.objective.count(1) ? p.objective.at(1) : 0;
      double val = sense * (c0 * x + c1 * y);
      if (!out.feasible || val < out.best) {
        out.feasible = true;
        out.best = val;
      }
    }
  return out;
}

}  // namespace

TEST_CASE("random boxed programs match vertex enumeration") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_int_distribution<int> nrows(1, 5);
  for (int trial = 0; trial < 200; ++trial) {
    LinearProgram p;
    int x = p.add_variable("x");
    int y = p.add_variable("y");
    p.maximize = trial % 2 == 0;
    p.objective[x] = coef(rng);
    p.objective[y] = coef(rng);
    int rows = nrows(rng);
    for (int i = 0; i < rows; ++i)
      p.add_constraint(row({{x, coef(rng)}, {y, coef(rng)}},
                           rng() % 2 ? Relation::LessEq : Relation::GreaterEq,
                           coef(rng)));
    // Bounding box keeps every instance bounded.
    p.add_constraint(row({{x, 1}}, Relation::LessEq, 10));
    p.add_constraint(row({{x, 1}}, Relation::GreaterEq, -10));
    p.add_constraint(row({{y, 1}}, Relation::LessEq, 10));
    p.add_constraint(row({{y, 1}}, Relation::GreaterEq, -10));

    Solution s = solve(p);
    Enumerated e = enumerate(p);
    if (e.feasible) {
      REQUIRE(s.status == SolveStatus::Optimal);
      double sense = p.maximize ? -1.0 : 1.0;
      CHECK(sense * s.objective == doctest::Approx(e.best).epsilon(1e-7).scale(1));
    } else {
      CHECK(s.status == SolveStatus::Infeasible);
    }
  }
}

TEST_CASE("lp text export") {
  LinearProgram p;
  int x = p.add_variable("x");
  p.objective[x] = 1;
  p.add_constraint(row({{x, 1}}, Relation::GreaterEq, 3));
  std::string text = export_lp_text(p);
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("c1: x >= 3") != std::string::npos);
  CHECK(text.find("x free") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);

  LinearProgram empty;
  empty.add_variable("x", 0.0);
  std::string text2 = export_lp_text(empty);
  CHECK(text2.find("Subject To") != std::string::npos);
  CHECK(text2.find("x >= 0") != std::string::npos);

  // Round trip through the exporter is deterministic.
  CHECK(export_lp_text(p) == text);
}
