#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "qpbound/lp.hpp"

namespace qpbound::lp {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    default: return "NumericalFailure";
  }
}

int LinearProgram::add_variable(std::string name, std::optional<double> lower) {
  variables.push_back({std::move(name), lower});
  return int(variables.size()) - 1;
}

void LinearProgram::add_constraint(Constraint c) {
  constraints.push_back(std::move(c));
}

void LinearProgram::add_inequality(const AffineExpr& expr, Relation rel) {
  Constraint c;
  c.row = expr.terms();
  c.rel = rel;
  c.rhs = -expr.constant();
  constraints.push_back(std::move(c));
}

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-9;
constexpr long kIterationCap = 200000;

// Standard form: minimize c'y s.t. A y = b, y >= 0. Free variables are
// split into differences and lower bounds shifted out. Each inequality row
// is oriented so that, when possible, its slack column can start in the
// basis; artificials are created only for the remaining rows.
struct Standardized {
  std::vector<std::vector<double>> cols;  // structural + slack columns
  std::vector<double> b;
  std::vector<double> cost;
  double cost_shift = 0;
  struct VarMap {
    int plus = -1;
    int minus = -1;
    double shift = 0;
  };
  std::vector<VarMap> vmap;
  std::vector<double> row_scale;  // exact powers of two, sign tracks row flips
  std::vector<int> basis_slack;   // per row: slack column id or -1
};

Standardized standardize(const LinearProgram& lp) {
  const int m = int(lp.constraints.size());
  Standardized s;
  s.vmap.resize(lp.variables.size());

  int col = 0;
  for (size_t j = 0; j < lp.variables.size(); ++j) {
    s.vmap[j].plus = col++;
    if (lp.variables[j].lower.has_value())
      s.vmap[j].shift = *lp.variables[j].lower;
    else
      s.vmap[j].minus = col++;
  }
  int n_structural = col;
  int n_slacks = 0;
  for (const auto& c : lp.constraints)
    if (c.rel != Relation::Equal) ++n_slacks;
  s.cols.assign(n_structural + n_slacks, std::vector<double>(m, 0.0));
  s.b.assign(m, 0.0);
  s.cost.assign(n_structural + n_slacks, 0.0);

  double sense = lp.maximize ? -1.0 : 1.0;
  for (const auto& [j, cj] : lp.objective) {
    if (j < 0 || size_t(j) >= lp.variables.size())
      throw Error("LinearProgram: objective references an undeclared variable");
    const auto& vm = s.vmap[j];
    s.cost[vm.plus] += sense * cj;
    if (vm.minus >= 0) s.cost[vm.minus] -= sense * cj;
    s.cost_shift += sense * cj * vm.shift;
  }

  int slack = n_structural;
  s.basis_slack.assign(m, -1);
  s.row_scale.assign(m, 1.0);
  for (int i = 0; i < m; ++i) {
    const auto& c = lp.constraints[i];
    double rhs = c.rhs;
    for (const auto& [j, aij] : c.row) {
      if (j < 0 || size_t(j) >= lp.variables.size())
        throw Error("LinearProgram: constraint references an undeclared variable");
      if (!std::isfinite(aij)) throw Error("LinearProgram: non-finite coefficient");
      const auto& vm = s.vmap[j];
      s.cols[vm.plus][i] += aij;
      if (vm.minus >= 0) s.cols[vm.minus][i] -= aij;
      rhs -= aij * vm.shift;
    }
    s.b[i] = rhs;
    double orient = 1.0;
    if (c.rel == Relation::Equal) {
      if (rhs < 0) orient = -1.0;
    } else {
      // Pick the orientation that gives "a y + s = b, s >= 0, b >= 0" when
      // one exists; the slack then starts in the basis.
      bool less = c.rel == Relation::LessEq;
      if ((less && rhs < 0) || (!less && rhs <= 0)) orient = -1.0;
      s.cols[slack][i] = less ? 1.0 : -1.0;  // negated below with the row
      bool ready = less ? orient > 0 : orient < 0;
      if (ready) s.basis_slack[i] = slack;
      ++slack;
    }
    if (orient < 0) {
      for (auto& cj : s.cols) cj[i] = -cj[i];
      s.b[i] = -s.b[i];
    }
    s.row_scale[i] = orient;
  }

  // Exact power-of-two row equilibration on top of the orientation.
  for (int i = 0; i < m; ++i) {
    double mx = std::abs(s.b[i]);
    for (const auto& cj : s.cols) mx = std::max(mx, std::abs(cj[i]));
    if (mx == 0) continue;
    int exp2;
    std::frexp(mx, &exp2);
    double f = std::ldexp(1.0, -exp2 + 1);  // mx lands in [1, 2)
    if (f != 1.0) {
      for (auto& cj : s.cols) cj[i] *= f;
      s.b[i] *= f;
      s.row_scale[i] *= f;
    }
  }
  return s;
}

class RevisedSimplex {
 public:
  explicit RevisedSimplex(const Standardized& s)
      : s_(s), m_(int(s.b.size())), n_(int(s.cols.size())) {}

  SolveStatus run(std::vector<double>* y_out, double* objective,
                  double* phase1_obj, long* iterations, std::string* diag);

 private:
  const Standardized& s_;
  int m_;
  int n_;
  int n_art_ = 0;                   // artificial columns n_..n_+n_art_-1
  std::vector<int> art_row_;        // artificial index -> its row
  std::vector<std::vector<double>> binv_;
  std::vector<int> basis_;
  std::vector<char> in_basis_;      // structural columns only
  std::vector<double> xb_;
  long iters_ = 0;

  bool is_artificial(int j) const { return j >= n_; }

  void pivot(int leave_row, int entering, const std::vector<double>& d);
  bool refactorize();  // rebuild binv_ and xb_ from the basis columns
  SolveStatus phase(const std::vector<double>& cost, bool phase_two,
                    std::string* diag);
};

bool RevisedSimplex::refactorize() {
  // Gauss-Jordan inversion of the basis matrix with partial pivoting.
  std::vector<std::vector<double>> work(m_, std::vector<double>(2 * m_, 0.0));
  for (int r = 0; r < m_; ++r) {
    int j = basis_[r];
    if (is_artificial(j)) {
      work[art_row_[j - n_]][r] = 1.0;
    } else {
      const auto& aj = s_.cols[j];
      for (int i = 0; i < m_; ++i) work[i][r] = aj[i];
    }
    work[r][m_ + r] = 1.0;
  }
  for (int c = 0; c < m_; ++c) {
    int piv = c;
    for (int r = c + 1; r < m_; ++r)
      if (std::abs(work[r][c]) > std::abs(work[piv][c])) piv = r;
    if (std::abs(work[piv][c]) < 1e-13) return false;
    std::swap(work[c], work[piv]);
    double inv = 1.0 / work[c][c];
    for (int j = c; j < 2 * m_; ++j) work[c][j] *= inv;
    for (int r = 0; r < m_; ++r) {
      if (r == c) continue;
      double f = work[r][c];
      if (f == 0) continue;
      for (int j = c; j < 2 * m_; ++j) work[r][j] -= f * work[c][j];
    }
  }
  // The inverse of the column-permuted basis: row r of binv_ maps b to the
  // multiplier of basis column r.
  for (int r = 0; r < m_; ++r)
    for (int i = 0; i < m_; ++i) binv_[r][i] = work[r][m_ + i];
  for (int r = 0; r < m_; ++r) {
    double acc = 0;
    for (int i = 0; i < m_; ++i) acc += binv_[r][i] * s_.b[i];
    xb_[r] = acc;
  }
  return true;
}

void RevisedSimplex::pivot(int leave_row, int entering,
                           const std::vector<double>& d) {
  double piv = d[leave_row];
  for (int i = 0; i < m_; ++i) binv_[leave_row][i] /= piv;
  xb_[leave_row] /= piv;
  for (int r = 0; r < m_; ++r) {
    if (r == leave_row) continue;
    double f = d[r];
    if (f == 0) continue;
    for (int i = 0; i < m_; ++i) binv_[r][i] -= f * binv_[leave_row][i];
    xb_[r] -= f * xb_[leave_row];
  }
  int old = basis_[leave_row];
  if (!is_artificial(old)) in_basis_[old] = 0;
  basis_[leave_row] = entering;
  if (!is_artificial(entering)) in_basis_[entering] = 1;
  ++iters_;
}

SolveStatus RevisedSimplex::phase(const std::vector<double>& cost,
                                  bool phase_two, std::string* diag) {
  const long stall_limit = 2L * (m_ + n_) + 64;
  long since_progress = 0;
  bool bland = false;
  double last_obj = std::numeric_limits<double>::infinity();

  for (long guard = 0; guard < kIterationCap; ++guard) {
    std::vector<double> y(m_, 0.0);
    for (int r = 0; r < m_; ++r) {
      double cb = cost[basis_[r]];
      if (cb == 0) continue;
      for (int i = 0; i < m_; ++i) y[i] += cb * binv_[r][i];
    }

    // Artificials never re-enter.
    int entering = -1;
    double best = -kPivotTol;
    for (int j = 0; j < n_; ++j) {
      if (in_basis_[j]) continue;
      double rc = cost[j];
      const auto& aj = s_.cols[j];
      for (int i = 0; i < m_; ++i) rc -= y[i] * aj[i];
      if (bland) {
        if (rc < -kPivotTol) {
          entering = j;
          break;
        }
      } else if (rc < best) {
        best = rc;
        entering = j;
      }
    }
    if (entering < 0) return SolveStatus::Optimal;

    std::vector<double> d(m_, 0.0);
    const auto& aj = s_.cols[entering];
    for (int r = 0; r < m_; ++r) {
      double acc = 0;
      for (int i = 0; i < m_; ++i) acc += binv_[r][i] * aj[i];
      d[r] = acc;
    }

    // In phase 2 every basic artificial sits at level zero; evict one with
    // a degenerate pivot whenever the direction touches its row, so the
    // artificial mass can never come back.
    int leave = -1;
    if (phase_two) {
      for (int r = 0; r < m_; ++r)
        if (is_artificial(basis_[r]) && std::abs(d[r]) > kPivotTol) {
          leave = r;
          break;
        }
    }
    if (leave < 0) {
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < m_; ++r) {
        if (d[r] > kPivotTol) {
          double ratio = xb_[r] / d[r];
          if (leave < 0 || ratio < best_ratio - 1e-12) {
            best_ratio = ratio;
            leave = r;
          } else if (ratio <= best_ratio + 1e-12 && basis_[r] < basis_[leave]) {
            leave = r;  // tie broken toward the lowest basis index
          }
        }
      }
    }
    if (leave < 0) return SolveStatus::Unbounded;
    pivot(leave, entering, d);

    double obj = 0;
    for (int r = 0; r < m_; ++r) obj += cost[basis_[r]] * xb_[r];
    if (obj < last_obj - 1e-13) {
      last_obj = obj;
      since_progress = 0;
    } else if (!bland && ++since_progress > stall_limit) {
      bland = true;
    }
  }
  if (diag) *diag += "iteration cap reached; ";
  return SolveStatus::NumericalFailure;
}

SolveStatus RevisedSimplex::run(std::vector<double>* y_out, double* objective,
                                double* phase1_obj, long* iterations,
                                std::string* diag) {
  // Crash basis: the slack of every row oriented for it, an artificial for
  // the rest.
  basis_.resize(m_);
  in_basis_.assign(n_, 0);
  for (int i = 0; i < m_; ++i) {
    int slack = s_.basis_slack[i];
    if (slack >= 0) {
      basis_[i] = slack;
      in_basis_[slack] = 1;
    } else {
      art_row_.push_back(i);
      basis_[i] = n_ + n_art_;
      ++n_art_;
    }
  }
  binv_.assign(m_, std::vector<double>(m_, 0.0));
  for (int i = 0; i < m_; ++i) binv_[i][i] = 1.0;
  xb_ = s_.b;

  if (n_art_ > 0) {
    std::vector<double> c1(n_ + n_art_, 0.0);
    for (int j = n_; j < n_ + n_art_; ++j) c1[j] = 1.0;
    SolveStatus st = phase(c1, false, diag);
    if (st == SolveStatus::Unbounded) {
      if (diag) *diag += "phase-1 direction unbounded; ";
      return SolveStatus::NumericalFailure;
    }
    if (st != SolveStatus::Optimal) return st;
  }

  double p1 = 0;
  for (int r = 0; r < m_; ++r)
    if (is_artificial(basis_[r])) p1 += xb_[r];
  if (phase1_obj) *phase1_obj = p1;
  if (p1 > kFeasTol) return SolveStatus::Infeasible;

  std::vector<double> c2(n_ + n_art_, 0.0);
  for (int j = 0; j < n_; ++j) c2[j] = s_.cost[j];
  SolveStatus st = phase(c2, true, diag);
  if (st != SolveStatus::Optimal) return st;

  std::vector<double> y(n_, 0.0);
  for (int r = 0; r < m_; ++r)
    if (!is_artificial(basis_[r])) y[basis_[r]] = xb_[r];
  double obj = 0;
  for (int j = 0; j < n_; ++j) obj += s_.cost[j] * y[j];
  *objective = obj;
  *y_out = std::move(y);
  if (iterations) *iterations = iters_;
  return SolveStatus::Optimal;
}

}  // namespace

Solution solve(const LinearProgram& lp) {
  Solution sol;
  Standardized s = standardize(lp);
  RevisedSimplex simplex(s);
  std::vector<double> y;
  double obj = 0;
  double p1 = 0;
  sol.status = simplex.run(&y, &obj, &p1, &sol.iterations, &sol.diagnostics);
  sol.phase1_objective = p1;
  if (sol.status == SolveStatus::Infeasible) {
    std::ostringstream os;
    os << "phase-1 optimum " << p1 << " exceeds feasibility tolerance";
    sol.diagnostics += os.str();
    return sol;
  }
  if (sol.status != SolveStatus::Optimal) return sol;

  sol.values.assign(lp.variables.size(), 0.0);
  for (size_t j = 0; j < lp.variables.size(); ++j) {
    const auto& vm = s.vmap[j];
    double v = y[vm.plus];
    if (vm.minus >= 0) v -= y[vm.minus];
    sol.values[j] = v + vm.shift;
  }

  double sense = lp.maximize ? -1.0 : 1.0;
  sol.objective = sense * (obj + s.cost_shift) + lp.objective_constant;

  // Never report a violated vertex as Optimal.
  double worst = 0;
  for (const auto& c : lp.constraints) {
    double lhs = 0;
    for (const auto& [j, aij] : c.row) lhs += aij * sol.values[j];
    double viol;
    if (c.rel == Relation::LessEq)
      viol = lhs - c.rhs;
    else if (c.rel == Relation::GreaterEq)
      viol = c.rhs - lhs;
    else
      viol = std::abs(lhs - c.rhs);
    worst = std::max(worst, viol);
  }
  for (size_t j = 0; j < lp.variables.size(); ++j)
    if (lp.variables[j].lower)
      worst = std::max(worst, *lp.variables[j].lower - sol.values[j]);
  if (worst > 1e-8) {
    sol.status = SolveStatus::NumericalFailure;
    std::ostringstream os;
    os << "vertex violates constraints by " << worst;
    sol.diagnostics += os.str();
  }
  return sol;
}

}  // namespace qpbound::lp
