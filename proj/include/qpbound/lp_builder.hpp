#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qpbound/bias_coefficients.hpp"
#include "qpbound/lp.hpp"
#include "qpbound/model.hpp"
#include "qpbound/piecewise.hpp"

namespace qpbound {

enum class ProblemKind {
  UpperError,       // min E[Fbar + G], two-sided reward constraint
  LowerError,       // max E[Fbar - G], same constraints
  ComparisonUpper,  // min E[Fbar], one-sided >= 0
  ComparisonLower,  // max E[Fbar], one-sided <= 0
  ArbitraryUpper,   // UpperError without the unit-direction restriction
  ArbitraryLower,
};

enum class FunctionShape {
  CLinear,       // 8 free coefficients per function
  GlobalLinear,  // f10=f20=f30=f40, f11=f41, f22=f42 (3 free)
  Constant,      // a single level, all slopes zero
};

std::string to_string(ProblemKind k);
std::string to_string(FunctionShape s);
bool is_upper_kind(ProblemKind k);
bool is_error_kind(ProblemKind k);       // has G and a two-sided constraint
bool is_arbitrary_kind(ProblemKind k);

struct KindRestrictionViolated : Error {
  using Error::Error;
};
struct InvalidProductForm : Error {
  using Error::Error;
};
struct NotOptimal : Error {
  using Error::Error;
};

struct BoundCertificate {
  ProblemKind kind{};
  double bound = 0;
  CLinearFn fbar;
  CLinearFn g;        // zero for comparison kinds
  CLinearFn a1, a2;   // bias lower-bound functions
  CLinearFn b1, b2;   // bias upper-bound functions
  std::vector<std::pair<Step, CLinearFn>> e_family;
  struct Stats {
    int num_variables = 0;
    int num_constraints = 0;
    std::string solver_status;
  } lp_stats;
};

// The assembled finite linear program plus the symbolic metadata needed to
// extract certificates and to audit the compiled constraint rows.
struct AssembledProblem {
  ProblemKind kind{};
  FunctionShape shape{};
  lp::LinearProgram lp;
  GeometricProductForm rate{0.5, 0.5};
  CLinearFn measure;

  CLinearSymbolic fbar, g;  // g unused for comparison kinds
  CLinearSymbolic a[2], b[2];
  std::vector<std::pair<Step, CLinearSymbolic>> e_funcs;

  // Bias-bound rows before the nonnegativity compilation, exposed so tests
  // can compare the build-time max resolution against a direct evaluation.
  struct BiasRow {
    int i = 0;        // which bias direction e_i
    int k = 0;        // C-component the row quantifies over
    bool b_side = false;  // true: ... <= B_i, false: ... <= A_i
    TLinearSymbolic lhs_minus_rhs;  // >= 0 over the component's T-cells
  };
  std::vector<BiasRow> bias_rows;
};

// Builds the bound LP for the given problem kind: reward constraints with
// build-time worst-case resolution over the bias-bound sandwich, the
// recursion-derived constraints on A_i/B_i, nonnegativity compilation, and
// the closed-form objective.
AssembledProblem assemble(ProblemKind kind, const PerturbationPair& pair,
                          const GeometricProductForm& r, const CLinearFn& F,
                          FunctionShape shape = FunctionShape::CLinear);

BoundCertificate extract_certificate(const AssembledProblem& problem,
                                     const lp::Solution& solution);

// Convenience: assemble, solve, extract.
struct BoundResult {
  lp::SolveStatus status;
  BoundCertificate certificate;  // valid when status == Optimal
};
BoundResult solve_bound(ProblemKind kind, const PerturbationPair& pair,
                        const GeometricProductForm& r, const CLinearFn& F,
                        FunctionShape shape = FunctionShape::CLinear);

// Closed-form bounds for the symmetric joint-departures walk perturbed to
// equal axis rates mu/2: r = (-1+sqrt(1+8 lambda/mu))/2 and
// g = 2r(1-r)(mu/2-mu*)(mu-mu*)/(mu mu*), bracket (1-r)^2 -+ g.
std::pair<double, double> manual_prop4_bounds(double lambda, double mu,
                                              double mu_star);

}  // namespace qpbound
