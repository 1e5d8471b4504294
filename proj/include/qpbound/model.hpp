#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpbound {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One of the nine lattice directions.
struct Step {
  int u1 = 0;
  int u2 = 0;
  constexpr bool operator==(const Step&) const = default;
  constexpr Step operator-() const { return {-u1, -u2}; }
};

inline constexpr Step kE1{1, 0};
inline constexpr Step kE2{0, 1};
inline constexpr Step kD1{1, 1};
inline constexpr Step kD2{1, -1};
inline constexpr Step kZero{0, 0};

// All nine directions in lexicographic (u1,u2) order. Every loop over
// directions in this library follows this order so that results are
// reproducible run to run.
inline constexpr std::array<Step, 9> kAllSteps = {
    Step{-1, -1}, Step{-1, 0}, Step{-1, 1}, Step{0, -1}, Step{0, 0},
    Step{0, 1},   Step{1, -1}, Step{1, 0},  Step{1, 1}};

std::string step_name(Step u);

struct Point {
  long n1 = 0;
  long n2 = 0;
  constexpr bool operator==(const Point&) const = default;
  constexpr Point operator+(Step u) const { return {n1 + u.u1, n2 + u.u2}; }
  constexpr Point operator-(Step u) const { return {n1 - u.u1, n2 - u.u2}; }
  constexpr bool in_quarter_plane() const { return n1 >= 0 && n2 >= 0; }
};

// C-partition: 1 horizontal axis, 2 vertical axis, 3 origin, 4 interior.
int component_of(Point n);

// u is a neighbor direction for states in component k (u ∈ N_k).
bool step_in_neighborhood(int k, Step u);

// The directions of N_k in kAllSteps order.
const std::vector<Step>& neighborhood(int k);

// Transition probabilities p_{k,u} of a quarter-plane random walk, one
// kernel row per component. Entries outside N_k can be stored but are
// flagged by validate_walk.
class RandomWalkSpec {
 public:
  double p(int k, Step u) const { return p_[check_k(k)][u.u1 + 1][u.u2 + 1]; }
  void set_p(int k, Step u, double v) { p_[check_k(k)][u.u1 + 1][u.u2 + 1] = v; }
  double row_sum(int k) const;

  bool operator==(const RandomWalkSpec&) const = default;

 private:
  static int check_k(int k);
  double p_[4][3][3] = {};
};

struct ValidationIssue {
  std::string kind;  // "row-sum", "support", "negative"
  int k = 0;
  Step u{};
  double value = 0;
  std::string describe() const;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string describe() const;
};

ValidationReport validate_walk(const RandomWalkSpec& w, double tol = 1e-12);

// Two queues with simultaneous departures (single -d1 = (-1,-1) jump in the
// interior), rates normalized so that lambda1 + lambda2 + mu = 1.
RandomWalkSpec joint_departures(double lambda1, double lambda2, double mu,
                                double mu1, double mu2);

// Coupled processors: independent departures mu1, mu2 in the interior,
// adjusted axis rates mu_h, mu_v; lambda1 + lambda2 + mu1 + mu2 = 1.
RandomWalkSpec coupled_processors(double lambda1, double lambda2, double mu1,
                                  double mu2, double mu_h, double mu_v);

// The pair (r1, r2) of a geometric product-form distribution
// pi(n) = (1-r1) r1^n1 (1-r2) r2^n2, with r strictly inside (0,1)^2.
struct GeometricProductForm {
  double r1;
  double r2;
  GeometricProductForm(double r1_, double r2_);
  double pi(Point n) const;
};

// Original walk R and perturbed walk R-bar; q = p-bar - p.
struct PerturbationPair {
  RandomWalkSpec original;
  RandomWalkSpec perturbed;
  PerturbationPair(RandomWalkSpec orig, RandomWalkSpec pert);
  double q(int k, Step u) const {
    return perturbed.p(k, u) - original.p(k, u);
  }
};

struct StationarityCheck {
  bool ok = false;
  double max_residual = 0;
  // Residual of the balance equation, divided by pi(n), at the
  // representative state of each T-component (index t-1).
  std::array<double, 9> residuals{};
};

// The balance residual at state n divided by pi(n) depends only on the
// components k(n+u) of the neighbors, which are constant within each
// T-component, so checking the nine representatives certifies all of S.
StationarityCheck verify_geometric_stationarity(const RandomWalkSpec& w,
                                                const GeometricProductForm& r,
                                                double tol = 1e-10);

struct NoProductForm : Error {
  using Error::Error;
};

struct MultipleProductForms : Error {
  MultipleProductForms(std::string msg, std::vector<GeometricProductForm> r)
      : Error(std::move(msg)), roots(std::move(r)) {}
  std::vector<GeometricProductForm> roots;
};

// Solves the interior and horizontal-axis balance residuals for (r1, r2)
// with a damped Newton iteration over a 5x5 multi-start grid, then verifies
// the root at all nine representatives. Throws NoProductForm when no
// verified root exists in (0,1)^2 and MultipleProductForms when several
// distinct verified roots are found.
GeometricProductForm solve_rate_pair(const RandomWalkSpec& w,
                                     double verify_tol = 1e-10);

// A random walk with uniformly sampled kernel rows; used by the
// randomized verification suites.
RandomWalkSpec random_valid_walk(std::mt19937_64& rng);

}  // namespace qpbound
