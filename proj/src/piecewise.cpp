#include "qpbound/piecewise.hpp"

#include <cmath>
#include <stdexcept>

namespace qpbound {

int t_component_of(Point n) {
  if (!n.in_quarter_plane())
    throw Error("t_component_of: state outside the quarter-plane");
  int col = n.n1 >= 2 ? 2 : int(n.n1);
  int row = n.n2 >= 2 ? 2 : int(n.n2);
  return 3 * row + col + 1;
}

Point t_representative(int t) {
  static constexpr Point reps[9] = {{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1},
                                    {2, 1}, {0, 2}, {1, 2}, {2, 2}};
  if (t < 1 || t > 9) throw Error("T-component index out of range");
  return reps[t - 1];
}

int enclosing_component(int t) { return component_of(t_representative(t)); }

const std::vector<int>& t_components_of(int k) {
  static const std::array<std::vector<int>, 4> table = [] {
    std::array<std::vector<int>, 4> out;
    for (int t = 1; t <= 9; ++t) out[enclosing_component(t) - 1].push_back(t);
    return out;
  }();
  if (k < 1 || k > 4) throw Error("component index out of range");
  return table[k - 1];
}

double CLinearFn::evaluate(Point n) const {
  switch (component_of(n)) {
    case 1: return f10 + f11 * double(n.n1);
    case 2: return f20 + f22 * double(n.n2);
    case 3: return f30;
    default: return f40 + f41 * double(n.n1) + f42 * double(n.n2);
  }
}

double CLinearFn::coef(int k, int i) const {
  if (!clinear_slot_exists(k, i)) return 0.0;
  switch (k) {
    case 1: return i == 0 ? f10 : f11;
    case 2: return i == 0 ? f20 : f22;
    case 3: return f30;
    default: return i == 0 ? f40 : (i == 1 ? f41 : f42);
  }
}

void CLinearFn::set_coef(int k, int i, double v) {
  if (!clinear_slot_exists(k, i))
    throw Error("CLinearFn: slot (" + std::to_string(k) + "," +
                std::to_string(i) + ") does not exist");
  switch (k) {
    case 1: (i == 0 ? f10 : f11) = v; return;
    case 2: (i == 0 ? f20 : f22) = v; return;
    case 3: f30 = v; return;
    default: (i == 0 ? f40 : (i == 1 ? f41 : f42)) = v; return;
  }
}

CLinearFn measure_indicator_origin() {
  CLinearFn f;
  f.f30 = 1;
  return f;
}

CLinearFn measure_n1() {
  CLinearFn f;
  f.f11 = 1;
  f.f41 = 1;
  return f;
}

CLinearFn measure_n2() {
  CLinearFn f;
  f.f22 = 1;
  f.f42 = 1;
  return f;
}

AffineExpr AffineExpr::variable(int id, double coef) {
  AffineExpr e;
  e.add_term(id, coef);
  return e;
}

void AffineExpr::add_term(int id, double coef) {
  auto it = terms_.find(id);
  if (it == terms_.end()) {
    if (std::abs(coef) >= 1e-15) terms_.emplace(id, coef);
    return;
  }
  it->second += coef;
  if (std::abs(it->second) < 1e-15) terms_.erase(it);
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& o) {
  constant_ += o.constant_;
  for (const auto& [id, c] : o.terms_) add_term(id, c);
  return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& o) {
  constant_ -= o.constant_;
  for (const auto& [id, c] : o.terms_) add_term(id, -c);
  return *this;
}

AffineExpr& AffineExpr::operator*=(double s) {
  constant_ *= s;
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= s;
    if (std::abs(it->second) < 1e-15)
      it = terms_.erase(it);
    else
      ++it;
  }
  return *this;
}

double AffineExpr::evaluate(std::span<const double> values) const {
  double acc = constant_;
  for (const auto& [id, c] : terms_) {
    if (id < 0 || size_t(id) >= values.size())
      throw Error("AffineExpr: variable id outside assignment");
    acc += c * values[id];
  }
  return acc;
}

CLinearSymbolic::CLinearSymbolic(const CLinearFn& f) {
  for (int k = 1; k <= 4; ++k)
    for (int i = 0; i < 3; ++i)
      if (clinear_slot_exists(k, i)) c_[k - 1][i] = AffineExpr(f.coef(k, i));
}

void CLinearSymbolic::check_slot(int k, int i) {
  if (k < 1 || k > 4 || i < 0 || i > 2)
    throw Error("CLinearSymbolic: slot index out of range");
  if (!clinear_slot_exists(k, i))
    throw Error("CLinearSymbolic: slot (" + std::to_string(k) + "," +
                std::to_string(i) + ") does not exist");
}

const AffineExpr& CLinearSymbolic::coef(int k, int i) const {
  if (k < 1 || k > 4 || i < 0 || i > 2)
    throw Error("CLinearSymbolic: slot index out of range");
  return c_[k - 1][i];
}

void CLinearSymbolic::set_coef(int k, int i, AffineExpr e) {
  check_slot(k, i);
  c_[k - 1][i] = std::move(e);
}

CLinearFn CLinearSymbolic::concretize(std::span<const double> values) const {
  CLinearFn f;
  for (int k = 1; k <= 4; ++k)
    for (int i = 0; i < 3; ++i)
      if (clinear_slot_exists(k, i)) f.set_coef(k, i, c_[k - 1][i].evaluate(values));
  return f;
}

void TLinearSymbolic::check_t(int t, int i) {
  if (t < 1 || t > 9 || i < 0 || i > 2)
    throw Error("TLinearSymbolic: slot index out of range");
}

int TLinearSymbolic::domain_size() const {
  int n = 0;
  for (int t = 1; t <= 9; ++t)
    if (in_domain(t)) ++n;
  return n;
}

const AffineExpr& TLinearSymbolic::h(int t, int i) const {
  check_t(t, i);
  return h_[t - 1][i];
}

void TLinearSymbolic::set_h(int t, int i, AffineExpr e) {
  check_t(t, i);
  h_[t - 1][i] = std::move(e);
  domain_ |= std::uint16_t(1u << (t - 1));
}

AffineExpr TLinearSymbolic::evaluate_symbolic(Point n) const {
  int t = t_component_of(n);
  if (!in_domain(t))
    throw Error("TLinearSymbolic: state lies outside the function's domain");
  AffineExpr acc = h_[t - 1][0];
  acc += double(n.n1) * h_[t - 1][1];
  acc += double(n.n2) * h_[t - 1][2];
  return acc;
}

double TLinearSymbolic::evaluate(Point n, std::span<const double> values) const {
  return evaluate_symbolic(n).evaluate(values);
}

double TLinearSymbolic::evaluate_concrete(Point n) const {
  AffineExpr e = evaluate_symbolic(n);
  if (!e.is_constant())
    throw Error("TLinearSymbolic: evaluate_concrete on a symbolic function");
  return e.constant();
}

TLinearSymbolic& TLinearSymbolic::operator+=(const TLinearSymbolic& o) {
  domain_ &= o.domain_;
  for (int t = 1; t <= 9; ++t)
    for (int i = 0; i < 3; ++i)
      if (in_domain(t))
        h_[t - 1][i] += o.h_[t - 1][i];
      else
        h_[t - 1][i] = AffineExpr();
  return *this;
}

TLinearSymbolic& TLinearSymbolic::operator-=(const TLinearSymbolic& o) {
  domain_ &= o.domain_;
  for (int t = 1; t <= 9; ++t)
    for (int i = 0; i < 3; ++i)
      if (in_domain(t))
        h_[t - 1][i] -= o.h_[t - 1][i];
      else
        h_[t - 1][i] = AffineExpr();
  return *this;
}

TLinearSymbolic& TLinearSymbolic::operator*=(double s) {
  for (auto& slot : h_)
    for (auto& e : slot) e *= s;
  return *this;
}

TLinearSymbolic embed(const CLinearSymbolic& f) {
  TLinearSymbolic out;
  for (int t = 1; t <= 9; ++t) {
    int k = enclosing_component(t);
    for (int i = 0; i < 3; ++i)
      out.set_h(t, i, clinear_slot_exists(k, i) ? f.coef(k, i) : AffineExpr());
  }
  return out;
}

TLinearSymbolic embed(const CLinearFn& f) { return embed(CLinearSymbolic(f)); }

TLinearSymbolic shift(const CLinearSymbolic& f, Step u) {
  TLinearSymbolic out;
  std::uint16_t domain = 0;
  for (int t = 1; t <= 9; ++t) {
    Point rep = t_representative(t);
    Point moved = rep + u;
    // The minimum of each coordinate over T_t is attained at the
    // representative, so rep+u in S certifies n+u in S for all of T_t.
    if (!moved.in_quarter_plane()) continue;
    domain |= std::uint16_t(1u << (t - 1));
    int k = component_of(moved);  // constant over T_t
    AffineExpr h0 = clinear_slot_exists(k, 0) ? f.coef(k, 0) : AffineExpr();
    AffineExpr h1 = clinear_slot_exists(k, 1) ? f.coef(k, 1) : AffineExpr();
    AffineExpr h2 = clinear_slot_exists(k, 2) ? f.coef(k, 2) : AffineExpr();
    // f(n+u) = f_k0 + f_k1 (n1+u1) + f_k2 (n2+u2)
    h0 += double(u.u1) * h1;
    h0 += double(u.u2) * h2;
    out.set_h(t, 0, std::move(h0));
    out.set_h(t, 1, std::move(h1));
    out.set_h(t, 2, std::move(h2));
  }
  out.set_domain_mask(domain);
  return out;
}

TLinearSymbolic shift(const CLinearFn& f, Step u) {
  return shift(CLinearSymbolic(f), u);
}

std::vector<NonnegInequality> nonneg_inequalities(const TLinearSymbolic& h) {
  // Per T-component: the value at the representative, plus one slope
  // condition for every unbounded coordinate direction.
  struct Row {
    int t, a0, a1, a2;
  };
  static constexpr Row rows[] = {
      {1, 1, 0, 0},
      {2, 1, 1, 0},
      {3, 1, 2, 0}, {3, 0, 1, 0},
      {4, 1, 0, 1},
      {5, 1, 1, 1},
      {6, 1, 2, 1}, {6, 0, 1, 0},
      {7, 1, 0, 2}, {7, 0, 0, 1},
      {8, 1, 1, 2}, {8, 0, 0, 1},
      {9, 1, 2, 2}, {9, 0, 1, 0}, {9, 0, 0, 1},
  };
  std::vector<NonnegInequality> out;
  for (const Row& r : rows) {
    if (!h.in_domain(r.t)) continue;
    AffineExpr e;
    if (r.a0) e += double(r.a0) * h.h(r.t, 0);
    if (r.a1) e += double(r.a1) * h.h(r.t, 1);
    if (r.a2) e += double(r.a2) * h.h(r.t, 2);
    out.push_back({r.t, r.a0, r.a1, r.a2, std::move(e)});
  }
  return out;
}

AffineExpr expectation(const CLinearSymbolic& f, const GeometricProductForm& r) {
  double r1 = r.r1, r2 = r.r2;
  AffineExpr acc;
  acc += ((1 - r1) * (1 - r2)) * f.coef(3, 0);
  acc += (r1 * (1 - r2)) * f.coef(1, 0);
  acc += (r1 * (1 - r2) / (1 - r1)) * f.coef(1, 1);
  acc += ((1 - r1) * r2) * f.coef(2, 0);
  acc += ((1 - r1) * r2 / (1 - r2)) * f.coef(2, 2);
  acc += (r1 * r2) * f.coef(4, 0);
  acc += (r1 * r2 / (1 - r1)) * f.coef(4, 1);
  acc += (r1 * r2 / (1 - r2)) * f.coef(4, 2);
  return acc;
}

double expectation(const CLinearFn& f, const GeometricProductForm& r) {
  return expectation(CLinearSymbolic(f), r).constant();
}

namespace {

double dyadic(std::mt19937_64& rng, double scale) {
  std::uniform_int_distribution<int> d(-int(scale * 16), int(scale * 16));
  return d(rng) / 16.0;
}

}  // namespace

CLinearFn random_clinear(std::mt19937_64& rng, double scale) {
  CLinearFn f;
  for (int k = 1; k <= 4; ++k)
    for (int i = 0; i < 3; ++i)
      if (clinear_slot_exists(k, i)) f.set_coef(k, i, dyadic(rng, scale));
  return f;
}

TLinearSymbolic random_concrete_tlinear(std::mt19937_64& rng, double scale) {
  TLinearSymbolic h;
  for (int t = 1; t <= 9; ++t)
    for (int i = 0; i < 3; ++i) h.set_h(t, i, AffineExpr(dyadic(rng, scale)));
  return h;
}

Point nonneg_violation_witness(const TLinearSymbolic& h,
                               const NonnegInequality& ineq) {
  Point rep = t_representative(ineq.t);
  if (ineq.a0 != 0) return rep;  // the representative itself
  // Slope condition: march along the unbounded ray until the growing
  // negative slope term dominates the value at the representative.
  Step ray = ineq.a1 != 0 ? kE1 : kE2;
  double slope = ineq.a1 != 0 ? h.h(ineq.t, 1).constant() : h.h(ineq.t, 2).constant();
  if (!(slope < 0))
    throw Error("nonneg_violation_witness: inequality is not violated");
  double base = h.evaluate_concrete(rep);
  long steps = base <= 0 ? 1 : long(std::ceil((base + 1.0) / -slope));
  Point witness{rep.n1 + ray.u1 * steps, rep.n2 + ray.u2 * steps};
  return witness;
}

}  // namespace qpbound
