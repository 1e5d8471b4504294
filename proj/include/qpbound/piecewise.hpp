#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "qpbound/model.hpp"

namespace qpbound {

// T-partition: the refinement of the C-partition on which shifted C-linear
// functions stay componentwise linear.
//   T1={(0,0)}  T2={(1,0)}  T3={n1>=2,n2=0}
//   T4={(0,1)}  T5={(1,1)}  T6={n1>=2,n2=1}
//   T7={n1=0,n2>=2}  T8={n1=1,n2>=2}  T9={n1>=2,n2>=2}
int t_component_of(Point n);
Point t_representative(int t);
int enclosing_component(int t);                       // C-component of T_t
const std::vector<int>& t_components_of(int k);       // T-components inside C_k

// A concrete componentwise-linear function, eight coefficients:
// C1: f10 + f11*n1, C2: f20 + f22*n2, C3: f30, C4: f40 + f41*n1 + f42*n2.
struct CLinearFn {
  double f10 = 0, f11 = 0;
  double f20 = 0, f22 = 0;
  double f30 = 0;
  double f40 = 0, f41 = 0, f42 = 0;

  double evaluate(Point n) const;
  double coef(int k, int i) const;        // 0 for structurally missing slots
  void set_coef(int k, int i, double v);  // throws on missing slots
  bool operator==(const CLinearFn&) const = default;
};

// Slot (k,i) present in the 8-coefficient layout.
constexpr bool clinear_slot_exists(int k, int i) {
  return i == 0 || (k == 1 && i == 1) || (k == 2 && i == 2) || k == 4;
}

CLinearFn measure_indicator_origin();
CLinearFn measure_n1();
CLinearFn measure_n2();

// constant + sum of coefficient * decision variable; zero coefficients are
// dropped so equal expressions have equal representations.
class AffineExpr {
 public:
  AffineExpr() = default;
  explicit AffineExpr(double c) : constant_(c) {}
  static AffineExpr variable(int id, double coef = 1.0);

  double constant() const { return constant_; }
  const std::map<int, double>& terms() const { return terms_; }
  bool is_constant() const { return terms_.empty(); }
  bool is_zero() const { return terms_.empty() && constant_ == 0.0; }

  void add_constant(double c) { constant_ += c; }
  void add_term(int id, double coef);

  AffineExpr& operator+=(const AffineExpr& o);
  AffineExpr& operator-=(const AffineExpr& o);
  AffineExpr& operator*=(double s);
  friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
  friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
  friend AffineExpr operator*(double s, AffineExpr a) { return a *= s; }

  double evaluate(std::span<const double> values) const;

 private:
  double constant_ = 0;
  std::map<int, double> terms_;
};

// C-linear function whose eight coefficients are affine expressions in the
// decision variables. The concrete CLinearFn is the special case of
// constant expressions.
class CLinearSymbolic {
 public:
  CLinearSymbolic() = default;
  explicit CLinearSymbolic(const CLinearFn& f);

  const AffineExpr& coef(int k, int i) const;
  void set_coef(int k, int i, AffineExpr e);

  CLinearFn concretize(std::span<const double> values) const;

 private:
  AffineExpr c_[4][3];
  static void check_slot(int k, int i);
};

// T-linear function with affine-expression coefficients and an explicit
// domain: slots outside the domain are identically zero, matching shifts
// that leave the quarter-plane.
class TLinearSymbolic {
 public:
  TLinearSymbolic() = default;

  bool in_domain(int t) const { return (domain_ & (1u << (t - 1))) != 0; }
  std::uint16_t domain_mask() const { return domain_; }
  void set_domain_mask(std::uint16_t m) { domain_ = m; }
  int domain_size() const;

  const AffineExpr& h(int t, int i) const;
  void set_h(int t, int i, AffineExpr e);

  // h_{t,0} + h_{t,1} n1 + h_{t,2} n2 at t = t(n); throws out of domain.
  AffineExpr evaluate_symbolic(Point n) const;
  double evaluate(Point n, std::span<const double> values) const;
  // For concrete functions (all coefficients constant expressions).
  double evaluate_concrete(Point n) const;

  TLinearSymbolic& operator+=(const TLinearSymbolic& o);  // domain intersection
  TLinearSymbolic& operator-=(const TLinearSymbolic& o);
  TLinearSymbolic& operator*=(double s);
  friend TLinearSymbolic operator+(TLinearSymbolic a, const TLinearSymbolic& b) { return a += b; }
  friend TLinearSymbolic operator-(TLinearSymbolic a, const TLinearSymbolic& b) { return a -= b; }
  friend TLinearSymbolic operator*(double s, TLinearSymbolic a) { return a *= s; }

  void restrict_domain(std::uint16_t mask) { domain_ &= mask; }

 private:
  AffineExpr h_[9][3];
  std::uint16_t domain_ = 0;
  static void check_t(int t, int i);
};

// T-slots inherit the coefficients of the enclosing C-component.
TLinearSymbolic embed(const CLinearSymbolic& f);
TLinearSymbolic embed(const CLinearFn& f);

// Result evaluates to f(n+u) where n+u stays in S; domain drops the
// T-components that u pushes out of the quarter-plane.
TLinearSymbolic shift(const CLinearSymbolic& f, Step u);
TLinearSymbolic shift(const CLinearFn& f, Step u);

// One emitted inequality expr >= 0; (a0,a1,a2) are the multipliers of
// h_{t,0..2} so tests can reconstruct witness points.
struct NonnegInequality {
  int t = 0;
  int a0 = 0, a1 = 0, a2 = 0;
  AffineExpr expr;
};

// The finitely many linear inequalities equivalent to h >= 0 on the
// domain's T-components (15 when the domain is all of S).
std::vector<NonnegInequality> nonneg_inequalities(const TLinearSymbolic& h);

// Closed-form sum of f against the geometric product form, affine in the
// decision variables.
AffineExpr expectation(const CLinearSymbolic& f, const GeometricProductForm& r);
double expectation(const CLinearFn& f, const GeometricProductForm& r);

// Generators for the randomized verification suites. Coefficients are
// dyadic (multiples of 1/16) so evaluation is exact in double precision.
CLinearFn random_clinear(std::mt19937_64& rng, double scale = 4.0);
TLinearSymbolic random_concrete_tlinear(std::mt19937_64& rng, double scale = 4.0);

// Witness point for a violated nonnegativity inequality: a state where the
// function is negative, built from the representative or ray direction of
// the inequality's T-component.
Point nonneg_violation_witness(const TLinearSymbolic& h, const NonnegInequality& ineq);

}  // namespace qpbound
