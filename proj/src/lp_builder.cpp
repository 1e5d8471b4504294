#include "qpbound/lp_builder.hpp"

#include <cmath>
#include <cstdio>

#include "qpbound/bias_coefficients.hpp"

namespace qpbound {

std::string to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::UpperError: return "upper_error";
    case ProblemKind::LowerError: return "lower_error";
    case ProblemKind::ComparisonUpper: return "comparison_upper";
    case ProblemKind::ComparisonLower: return "comparison_lower";
    case ProblemKind::ArbitraryUpper: return "arbitrary_upper";
    default: return "arbitrary_lower";
  }
}

std::string to_string(FunctionShape s) {
  switch (s) {
    case FunctionShape::CLinear: return "clinear";
    case FunctionShape::GlobalLinear: return "global_linear";
    default: return "constant";
  }
}

bool is_upper_kind(ProblemKind k) {
  return k == ProblemKind::UpperError || k == ProblemKind::ComparisonUpper ||
         k == ProblemKind::ArbitraryUpper;
}

bool is_error_kind(ProblemKind k) {
  return k != ProblemKind::ComparisonUpper && k != ProblemKind::ComparisonLower;
}

bool is_arbitrary_kind(ProblemKind k) {
  return k == ProblemKind::ArbitraryUpper || k == ProblemKind::ArbitraryLower;
}

namespace {

constexpr double kQEps = 1e-15;

std::string dir_var_name(Step u) {
  std::string n = step_name(u);
  if (n == "0") return "zero";
  if (n[0] == '-') return "m" + n.substr(1);
  return n;
}

// Allocates the decision variables of one function under the shape policy.
CLinearSymbolic make_function(lp::LinearProgram& lp, const std::string& name,
                              FunctionShape shape) {
  CLinearSymbolic f;
  switch (shape) {
    case FunctionShape::CLinear: {
      static constexpr const char* slots[8] = {"f10", "f11", "f20", "f22",
                                               "f30", "f40", "f41", "f42"};
      static constexpr int ks[8] = {1, 1, 2, 2, 3, 4, 4, 4};
      static constexpr int is[8] = {0, 1, 0, 2, 0, 0, 1, 2};
      for (int s = 0; s < 8; ++s) {
        int id = lp.add_variable(name + "_" + slots[s]);
        f.set_coef(ks[s], is[s], AffineExpr::variable(id));
      }
      break;
    }
    case FunctionShape::GlobalLinear: {
      int g0 = lp.add_variable(name + "_g0");
      int g1 = lp.add_variable(name + "_g1");
      int g2 = lp.add_variable(name + "_g2");
      for (int k = 1; k <= 4; ++k) f.set_coef(k, 0, AffineExpr::variable(g0));
      f.set_coef(1, 1, AffineExpr::variable(g1));
      f.set_coef(4, 1, AffineExpr::variable(g1));
      f.set_coef(2, 2, AffineExpr::variable(g2));
      f.set_coef(4, 2, AffineExpr::variable(g2));
      break;
    }
    case FunctionShape::Constant: {
      int g0 = lp.add_variable(name + "_c");
      for (int k = 1; k <= 4; ++k) f.set_coef(k, 0, AffineExpr::variable(g0));
      break;
    }
  }
  return f;
}

TLinearSymbolic zero_full_domain() { return embed(CLinearSymbolic()); }

std::uint16_t component_mask(int k) {
  std::uint16_t m = 0;
  for (int t : t_components_of(k)) m |= std::uint16_t(1u << (t - 1));
  return m;
}

struct Builder {
  AssembledProblem& P;
  const PerturbationPair& pair;
  const CLinearFn& F;

  // Bias-term sandwich functions for an arbitrary direction, written as
  // shifts of the unit-direction functions; for u = e_i these reduce to the
  // functions themselves.
  TLinearSymbolic composite_a(Step u) const {
    TLinearSymbolic acc = zero_full_domain();
    if (u.u1 == 1) acc += embed(P.a[0]);
    if (u.u1 == -1) acc += shift(P.b[0], -kE1);
    if (u.u2 == 1) acc += shift(P.a[1], Step{u.u1, 0});
    if (u.u2 == -1) acc += shift(P.b[1], u);
    return acc;
  }
  TLinearSymbolic composite_b(Step u) const {
    TLinearSymbolic acc = zero_full_domain();
    if (u.u1 == 1) acc += embed(P.b[0]);
    if (u.u1 == -1) acc += shift(P.a[0], -kE1);
    if (u.u2 == 1) acc += shift(P.b[1], Step{u.u1, 0});
    if (u.u2 == -1) acc += shift(P.a[1], u);
    return acc;
  }

  // sup / inf of q * D_u over the sandwich, as T-linear expressions.
  TLinearSymbolic resolved_sup(double q, Step u) const {
    return q >= 0 ? q * composite_b(u) : (-q) * composite_a(u);
  }
  TLinearSymbolic resolved_inf(double q, Step u) const {
    return q >= 0 ? (-q) * composite_a(u) : q * composite_b(u);
  }

  void emit(TLinearSymbolic expr, int k) {
    std::uint16_t mask = component_mask(k);
    expr.restrict_domain(mask);
    if (expr.domain_mask() != mask)
      throw Error("internal: a constraint family references a shift that "
                  "leaves the state space");
    for (const auto& iq : nonneg_inequalities(expr))
      P.lp.add_inequality(iq.expr, lp::Relation::GreaterEq);
  }

  void emit_full(const TLinearSymbolic& expr) {
    for (const auto& iq : nonneg_inequalities(expr))
      P.lp.add_inequality(iq.expr, lp::Relation::GreaterEq);
  }
};

}  // namespace

AssembledProblem assemble(ProblemKind kind, const PerturbationPair& pair,
                          const GeometricProductForm& r, const CLinearFn& F,
                          FunctionShape shape) {
  {
    auto rep = validate_walk(pair.original);
    if (!rep.ok()) throw Error("assemble: original walk invalid: " + rep.describe());
    rep = validate_walk(pair.perturbed);
    if (!rep.ok()) throw Error("assemble: perturbed walk invalid: " + rep.describe());
  }
  if (!verify_geometric_stationarity(pair.perturbed, r, 1e-8).ok)
    throw InvalidProductForm(
        "assemble: the perturbed walk is not stationary under the supplied "
        "product form");
  if (!is_arbitrary_kind(kind)) {
    for (int k = 1; k <= 4; ++k)
      for (Step u : neighborhood(k))
        if (std::abs(u.u1) + std::abs(u.u2) == 2 && std::abs(pair.q(k, u)) > kQEps)
          throw KindRestrictionViolated(
              to_string(kind) + " requires q to vanish off the unit directions; "
              "q(" + std::to_string(k) + "," + step_name(u) + ") != 0");
  }

  AssembledProblem P;
  P.kind = kind;
  P.shape = shape;
  P.rate = r;
  P.measure = F;

  const bool error_kind = is_error_kind(kind);
  P.fbar = make_function(P.lp, "Fbar", shape);
  if (error_kind) P.g = make_function(P.lp, "G", shape);
  for (int i = 0; i < 2; ++i)
    P.a[i] = make_function(P.lp, "A" + std::to_string(i + 1), shape);
  for (int i = 0; i < 2; ++i)
    P.b[i] = make_function(P.lp, "B" + std::to_string(i + 1), shape);

  std::vector<Step> e_dirs;
  if (!is_arbitrary_kind(kind)) {
    e_dirs = {kE1, kE2};
  } else {
    for (Step u : kAllSteps) {
      if (u == kZero) continue;
      bool supported = false;
      for (int k = 1; k <= 4 && !supported; ++k)
        if (step_in_neighborhood(k, u) && std::abs(pair.q(k, u)) > kQEps)
          supported = true;
      if (supported) e_dirs.push_back(u);
    }
  }
  for (Step u : e_dirs) {
    std::string name = !is_arbitrary_kind(kind)
                           ? (u == kE1 ? std::string("E1") : std::string("E2"))
                           : "E_" + dir_var_name(u);
    P.e_funcs.emplace_back(u, make_function(P.lp, name, shape));
  }
  auto e_of = [&](Step u) -> const CLinearSymbolic& {
    for (const auto& [dir, fn] : P.e_funcs)
      if (dir == u) return fn;
    throw Error("internal: missing E function");
  };

  Builder B{P, pair, F};

  // Reward constraints. The bound theorems quantify over every horizon, so
  // each occurrence of a bias term is replaced by its worst bound; the
  // sandwich makes the per-E rows below a consequence of these.
  for (int k = 1; k <= 4; ++k) {
    TLinearSymbolic x = embed(P.fbar) - embed(F);
    TLinearSymbolic sup_terms = zero_full_domain();
    TLinearSymbolic inf_terms = zero_full_domain();
    for (Step u : neighborhood(k)) {
      if (u == kZero) continue;  // D_0 vanishes
      double q = pair.q(k, u);
      if (std::abs(q) <= kQEps) continue;
      sup_terms += B.resolved_sup(q, u);
      inf_terms += B.resolved_inf(q, u);
    }
    switch (kind) {
      case ProblemKind::UpperError:
      case ProblemKind::LowerError:
      case ProblemKind::ArbitraryUpper:
      case ProblemKind::ArbitraryLower:
        B.emit(embed(P.g) - x - sup_terms, k);
        B.emit(embed(P.g) + x + inf_terms, k);
        break;
      case ProblemKind::ComparisonUpper:
        B.emit(x + inf_terms, k);
        break;
      case ProblemKind::ComparisonLower:
        B.emit(zero_full_domain() - x - sup_terms, k);
        break;
    }
  }

  // The same constraints written through the E proxies.
  for (int k = 1; k <= 4; ++k) {
    TLinearSymbolic expr_e = embed(P.fbar) - embed(F);
    for (Step u : neighborhood(k)) {
      if (u == kZero) continue;
      double q = pair.q(k, u);
      if (std::abs(q) <= kQEps) continue;
      if (is_arbitrary_kind(kind)) {
        expr_e += q * embed(e_of(u));
      } else if (u == kE1 || u == kE2) {
        expr_e += q * embed(e_of(u));
      } else {
        // D_{-e_i}(n) = -D_{e_i}(n - e_i)
        Step ei = u == -kE1 ? kE1 : kE2;
        expr_e += (-q) * shift(e_of(ei), u);
      }
    }
    if (error_kind) {
      B.emit(embed(P.g) - expr_e, k);
      B.emit(embed(P.g) + expr_e, k);
    } else if (kind == ProblemKind::ComparisonUpper) {
      B.emit(expr_e, k);
    } else {
      B.emit(zero_full_domain() - expr_e, k);
    }
  }

  // Sandwich -A_u <= E_u <= B_u on the T-components where n+u stays inside S.
  for (const auto& [u, efn] : P.e_funcs) {
    TLinearSymbolic upper = B.composite_b(u) - embed(efn);
    TLinearSymbolic lower = embed(efn) + B.composite_a(u);
    for (const auto& iq : nonneg_inequalities(upper))
      P.lp.add_inequality(iq.expr, lp::Relation::GreaterEq);
    for (const auto& iq : nonneg_inequalities(lower))
      P.lp.add_inequality(iq.expr, lp::Relation::GreaterEq);
  }

  // Recursion-derived constraints on the bias-bound functions, max terms
  // resolved by the sign of each coefficient since A, B >= 0 is imposed.
  CoefficientTable table = from_table1(pair.original);
  for (int i = 1; i <= 2; ++i) {
    Step ei = i == 1 ? kE1 : kE2;
    for (int k = 1; k <= 4; ++k) {
      TLinearSymbolic fdiff = shift(F, ei) - embed(F);
      TLinearSymbolic sum_b = zero_full_domain();
      TLinearSymbolic sum_a = zero_full_domain();
      for (int j = 1; j <= 2; ++j) {
        for (Step u : neighborhood(k)) {
          double c = table.c(i, k, j, u);
          if (c == 0.0) continue;
          if (c >= 0) {
            sum_b += c * shift(P.b[j - 1], u);
            sum_a += c * shift(P.a[j - 1], u);
          } else {
            sum_b += (-c) * shift(P.a[j - 1], u);
            sum_a += (-c) * shift(P.b[j - 1], u);
          }
        }
      }
      TLinearSymbolic row_b = embed(P.b[i - 1]) - fdiff - sum_b;
      TLinearSymbolic row_a = embed(P.a[i - 1]) + fdiff - sum_a;
      row_b.restrict_domain(component_mask(k));
      row_a.restrict_domain(component_mask(k));
      P.bias_rows.push_back({i, k, true, row_b});
      P.bias_rows.push_back({i, k, false, row_a});
      B.emit(row_b, k);
      B.emit(row_a, k);
    }
  }

  // Nonnegativity of Fbar, G and the bias-bound functions.
  B.emit_full(embed(P.fbar));
  if (error_kind) B.emit_full(embed(P.g));
  for (int i = 0; i < 2; ++i) B.emit_full(embed(P.a[i]));
  for (int i = 0; i < 2; ++i) B.emit_full(embed(P.b[i]));

  // Objective.
  AffineExpr obj = expectation(P.fbar, r);
  if (error_kind) {
    AffineExpr ge = expectation(P.g, r);
    if (is_upper_kind(kind))
      obj += ge;
    else
      obj -= ge;
  }
  P.lp.maximize = !is_upper_kind(kind);
  P.lp.objective_constant = obj.constant();
  for (const auto& [id, coef] : obj.terms()) P.lp.objective[id] = coef;
  return P;
}

BoundCertificate extract_certificate(const AssembledProblem& problem,
                                     const lp::Solution& solution) {
  if (solution.status != lp::SolveStatus::Optimal)
    throw NotOptimal("extract_certificate: solver status " +
                     lp::to_string(solution.status));
  BoundCertificate cert;
  cert.kind = problem.kind;
  std::span<const double> vals(solution.values);
  cert.fbar = problem.fbar.concretize(vals);
  if (is_error_kind(problem.kind)) cert.g = problem.g.concretize(vals);
  cert.a1 = problem.a[0].concretize(vals);
  cert.a2 = problem.a[1].concretize(vals);
  cert.b1 = problem.b[0].concretize(vals);
  cert.b2 = problem.b[1].concretize(vals);
  for (const auto& [u, fn] : problem.e_funcs)
    cert.e_family.emplace_back(u, fn.concretize(vals));

  double bound = expectation(cert.fbar, problem.rate);
  if (is_error_kind(problem.kind)) {
    double ge = expectation(cert.g, problem.rate);
    bound += is_upper_kind(problem.kind) ? ge : -ge;
  }
  if (std::abs(bound - solution.objective) > 1e-9)
    throw Error("extract_certificate: recomputed bound disagrees with the "
                "solver objective");
  cert.bound = bound;
  cert.lp_stats.num_variables = int(problem.lp.variables.size());
  cert.lp_stats.num_constraints = int(problem.lp.constraints.size());
  cert.lp_stats.solver_status = lp::to_string(solution.status);
  return cert;
}

BoundResult solve_bound(ProblemKind kind, const PerturbationPair& pair,
                        const GeometricProductForm& r, const CLinearFn& F,
                        FunctionShape shape) {
  AssembledProblem problem = assemble(kind, pair, r, F, shape);
  lp::Solution sol = lp::solve(problem.lp);
  BoundResult out;
  out.status = sol.status;
  if (sol.status == lp::SolveStatus::Optimal)
    out.certificate = extract_certificate(problem, sol);
  return out;
}

std::pair<double, double> manual_prop4_bounds(double lambda, double mu,
                                              double mu_star) {
  if (std::abs(2 * lambda + mu - 1.0) > 1e-12)
    throw Error("manual_prop4_bounds: requires 2*lambda + mu = 1");
  if (!(mu_star > 0) || mu_star > mu / 2 + 1e-15)
    throw Error("manual_prop4_bounds: requires 0 < mu_star <= mu/2");
  double r = (-1 + std::sqrt(1 + 8 * lambda / mu)) / 2;
  double g = 2 * r * (1 - r) * (mu / 2 - mu_star) * (mu - mu_star) / (mu * mu_star);
  double center = (1 - r) * (1 - r);
  return {center - g, center + g};
}

}  // namespace qpbound
