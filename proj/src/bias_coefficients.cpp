#include "qpbound/bias_coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qpbound/oracle.hpp"

namespace qpbound {

int CoefficientTable::check(int i, int k, int j) {
  if (i < 1 || i > 2 || k < 1 || k > 4 || j < 1 || j > 2)
    throw Error("CoefficientTable: index out of range");
  return ((i - 1) * 4 + (k - 1)) * 2 + (j - 1);
}

int k_bracket(int i, int k) {
  Point rep;
  switch (k) {
    case 1: rep = {1, 0}; break;
    case 2: rep = {0, 1}; break;
    case 3: rep = {0, 0}; break;
    case 4: rep = {1, 1}; break;
    default: throw Error("component index out of range");
  }
  return component_of(rep + (i == 1 ? kE1 : kE2));
}

CoefficientTable from_table1(const RandomWalkSpec& w) {
  CoefficientTable c;
  auto p = [&](int k, Step u) { return w.p(k, u); };

  // i = 1
  for (Step u : neighborhood(1)) c.set_c(1, 1, 1, u, p(1, u));
  for (Step u : {kD1, kE1, kD2}) c.set_c(1, 2, 1, u, p(4, u));
  c.set_c(1, 2, 1, kE2, p(4, kE2) - p(2, kD1) + c.c(1, 2, 1, kD1));
  c.set_c(1, 2, 1, kZero, p(4, kZero) - p(2, kE1) + c.c(1, 2, 1, kE1));
  c.set_c(1, 2, 1, -kE2, p(4, -kE2) - p(2, kD2) + c.c(1, 2, 1, kD2));
  c.set_c(1, 2, 2, kZero, p(4, -kD2) - p(2, kE2) + c.c(1, 2, 1, kE2));
  c.set_c(1, 2, 2, -kE2,
          p(4, -kE1) - p(2, kZero) + c.c(1, 2, 2, kZero) + c.c(1, 2, 1, kZero));
  for (Step u : {kE1, kD1}) c.set_c(1, 3, 1, u, p(1, u));
  c.set_c(1, 3, 1, kE2, p(1, kE2) - p(3, kD1) + c.c(1, 3, 1, kD1));
  c.set_c(1, 3, 1, kZero, p(1, kZero) - p(3, kE1) + c.c(1, 3, 1, kE1));
  c.set_c(1, 3, 2, kZero, p(1, -kD2) - p(3, kE2) + c.c(1, 3, 1, kE2));
  for (Step u : neighborhood(4)) c.set_c(1, 4, 1, u, p(4, u));

  // i = 2 (mirror of the first block with the roles of the axes swapped)
  for (Step u : {kD1, kE2, -kD2}) c.set_c(2, 1, 2, u, p(4, u));
  c.set_c(2, 1, 2, kE1, p(4, kE1) - p(1, kD1) + c.c(2, 1, 2, kD1));
  c.set_c(2, 1, 2, kZero, p(4, kZero) - p(1, kE2) + c.c(2, 1, 2, kE2));
  c.set_c(2, 1, 2, -kE1, p(4, -kE1) - p(1, -kD2) + c.c(2, 1, 2, -kD2));
  c.set_c(2, 1, 1, kZero, p(4, kD2) - p(1, kE1) + c.c(2, 1, 2, kE1));
  c.set_c(2, 1, 1, -kE1,
          p(4, -kE2) - p(1, kZero) + c.c(2, 1, 1, kZero) + c.c(2, 1, 2, kZero));
  for (Step u : neighborhood(2)) c.set_c(2, 2, 2, u, p(2, u));
  for (Step u : {kD1, kE2}) c.set_c(2, 3, 2, u, p(2, u));
  c.set_c(2, 3, 2, kE1, p(2, kE1) - p(3, kD1) + c.c(2, 3, 2, kD1));
  c.set_c(2, 3, 2, kZero, p(2, kZero) - p(3, kE2) + c.c(2, 3, 2, kE2));
  c.set_c(2, 3, 1, kZero, p(2, kD2) - p(3, kE1) + c.c(2, 3, 2, kE1));
  for (Step u : neighborhood(4)) c.set_c(2, 4, 2, u, p(4, u));

  return c;
}

AssumptionReport verify_assumption(const CoefficientTable& c,
                                   const RandomWalkSpec& walk, double tol) {
  AssumptionReport rep;
  for (int i = 1; i <= 2; ++i) {
    Step ei = i == 1 ? kE1 : kE2;
    for (int k = 1; k <= 4; ++k) {
      int ki = k_bracket(i, k);
      // The point set N_k ∪ (N_{k[1]}+e1) ∪ (N_{k[2]}+e2), computed, not
      // hand-enumerated.
      std::set<std::pair<int, int>> points;
      for (Step u : neighborhood(k)) points.insert({u.u1, u.u2});
      for (Step u : neighborhood(k_bracket(1, k)))
        points.insert({u.u1 + 1, u.u2});
      for (Step u : neighborhood(k_bracket(2, k)))
        points.insert({u.u1, u.u2 + 1});

      for (auto [w1, w2] : points) {
        auto in_nk = [&](int a, int b) {
          return a >= -1 && a <= 1 && b >= -1 && b <= 1 &&
                 step_in_neighborhood(k, Step{a, b});
        };
        double lhs = 0;
        if (in_nk(w1 - 1, w2)) lhs += c.c(i, k, 1, Step{w1 - 1, w2});
        if (in_nk(w1, w2)) lhs -= c.c(i, k, 1, Step{w1, w2});
        if (in_nk(w1, w2 - 1)) lhs += c.c(i, k, 2, Step{w1, w2 - 1});
        if (in_nk(w1, w2)) lhs -= c.c(i, k, 2, Step{w1, w2});

        double rhs = 0;
        int v1 = w1 - ei.u1, v2 = w2 - ei.u2;
        if (v1 >= -1 && v1 <= 1 && v2 >= -1 && v2 <= 1 &&
            step_in_neighborhood(ki, Step{v1, v2}))
          rhs += walk.p(ki, Step{v1, v2});
        if (in_nk(w1, w2)) rhs -= walk.p(k, Step{w1, w2});

        double res = lhs - rhs;
        rep.max_residual = std::max(rep.max_residual, std::abs(res));
        if (std::abs(res) > tol)
          rep.violations.push_back({i, k, Step{w1, w2}, res});
      }
    }
  }
  rep.ok = rep.violations.empty();
  return rep;
}

RecursionCheck recursion_check(const CoefficientTable& c, const RandomWalkSpec& w,
                               const CLinearFn& F, int t_max, int M, double tol) {
  RecursionCheck out;
  BiasIterator iter(w, F, M);
  // D_j^t is exact for coordinates <= M - t - 1; to evaluate the recursion
  // at n we also need n+u inside that region.
  for (int t = 0; t < t_max; ++t) {
    BiasIterator next = iter;
    next.step();
    long extent = long(M) - t - 2;
    if (extent < 1) break;
    for (long n2 = 0; n2 < extent; ++n2) {
      for (long n1 = 0; n1 < extent; ++n1) {
        Point n{n1, n2};
        int k = component_of(n);
        for (int i = 1; i <= 2; ++i) {
          Step ei = i == 1 ? kE1 : kE2;
          double expected = F.evaluate(n + ei) - F.evaluate(n);
          for (int j = 1; j <= 2; ++j)
            for (Step u : neighborhood(k)) {
              double coef = c.c(i, k, j, u);
              if (coef != 0.0) expected += coef * iter.d(j, n + u);
            }
          double got = next.d(i, n);
          out.max_deviation = std::max(out.max_deviation, std::abs(got - expected));
        }
      }
    }
    iter = std::move(next);
  }
  out.ok = out.max_deviation <= tol;
  return out;
}

}  // namespace qpbound
