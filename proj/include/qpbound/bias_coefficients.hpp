#pragma once

#include <string>
#include <vector>

#include "qpbound/model.hpp"
#include "qpbound/piecewise.hpp"

namespace qpbound {

// Constants c_{i,k,j,u} expressing the bias-term recursion
//   D_i^{t+1}(n) = F(n+e_i) - F(n) + sum_{j,u in N_k(n)} c_{i,k(n),j,u} D_j^t(n+u).
class CoefficientTable {
 public:
  double c(int i, int k, int j, Step u) const {
    return c_[check(i, k, j)][0][u.u1 + 1][u.u2 + 1];
  }
  void set_c(int i, int k, int j, Step u, double v) {
    c_[check(i, k, j)][0][u.u1 + 1][u.u2 + 1] = v;
  }

 private:
  static int check(int i, int k, int j);
  double c_[16][1][3][3] = {};
};

// k[i] = k(n + e_i) for n in C_k.
int k_bracket(int i, int k);

// Fills the table from the walk's transition probabilities, following the
// published dependency chains; unlisted slots stay exactly zero.
CoefficientTable from_table1(const RandomWalkSpec& w);

struct AssumptionViolation {
  int i = 0;
  int k = 0;
  Step w{};
  double residual = 0;
};

struct AssumptionReport {
  bool ok = false;
  double max_residual = 0;
  std::vector<AssumptionViolation> violations;  // entries above tol
};

// Checks the flow-balance identity behind the recursion at every lattice
// point w in N_k ∪ (N_{k[1]}+e1) ∪ (N_{k[2]}+e2), for each i and k.
AssumptionReport verify_assumption(const CoefficientTable& c,
                                   const RandomWalkSpec& w, double tol = 1e-12);

struct RecursionCheck {
  bool ok = false;
  double max_deviation = 0;
};

// Replays the recursion against finite-horizon values from the oracle and
// reports the largest pointwise deviation over t < t_max on the safe region.
RecursionCheck recursion_check(const CoefficientTable& c, const RandomWalkSpec& w,
                               const CLinearFn& F, int t_max, int M,
                               double tol = 1e-9);

}  // namespace qpbound
