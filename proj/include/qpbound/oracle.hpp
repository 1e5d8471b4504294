#pragma once

#include <string>
#include <vector>

#include "qpbound/grid_kernels.hpp"
#include "qpbound/lp_builder.hpp"
#include "qpbound/model.hpp"
#include "qpbound/piecewise.hpp"

namespace qpbound {

// Stationary distribution of the walk restricted to [0,M]^2, outgoing mass
// at the box boundary redirected into a self-loop.
struct TruncatedDistribution {
  int M = 0;
  std::vector<double> probs;  // (M+1)^2, row-major, index n2*(M+1)+n1
  double residual = 0;        // max violation of the untruncated balance equations
  long sweeps = 0;
  bool converged = false;

  double at(Point n) const;
};

TruncatedDistribution stationary_truncated(const RandomWalkSpec& w, int M,
                                           double tol = 1e-12,
                                           long max_sweeps = 200000,
                                           const TruncatedDistribution* warm = nullptr);

struct SteadyStateValue {
  double value = 0;
  double error_bar = 0;  // |value_M - value_2M| at the accepted doubling step
  int M_used = 0;
};

// Adaptive truncation: doubles M from initial_M until two successive grid
// sizes agree to tol.
SteadyStateValue steady_state_value(const RandomWalkSpec& w, const CLinearFn& F,
                                    double tol = 1e-8, int initial_M = 100,
                                    int max_M = 3200);

// Finite-horizon cumulative reward F^t, advanced one horizon at a time.
// Values are exact for the infinite chain at coordinates <= M - t.
class BiasIterator {
 public:
  BiasIterator(const RandomWalkSpec& w, const CLinearFn& F, int M);

  void step();
  int horizon() const { return t_; }
  int M() const { return M_; }
  long safe_extent() const { return long(M_) - t_; }

  double f(Point n) const { return cur_[n.n2 * (M_ + 1) + n.n1]; }
  // D_i^t(n) = F^t(n+e_i) - F^t(n); exact for coordinates <= M - t - 1.
  double d(int i, Point n) const {
    return f(n + (i == 1 ? kE1 : kE2)) - f(n);
  }
  double d(Step u, Point n) const { return f(n + u) - f(n); }

 private:
  int M_;
  int t_ = 0;
  kernels::WalkKernel kernel_;
  std::vector<double> reward_, cur_, buf_;
};

struct BiasField {
  int t = 0;
  int M = 0;
  long safe_extent = 0;  // D grids cover [0, safe_extent]^2
  std::vector<double> d1, d2;

  double d(int i, Point n) const;
};

BiasField bias_field(const RandomWalkSpec& w, const CLinearFn& F, int t, int M);

struct CertificateCheck {
  bool ok = false;
  // min over t <= t_max and the safe region of B_i - D_i^t and D_i^t + A_i.
  double worst_sandwich_margin = 0;
  // min of G - |expr| (error kinds) or the one-sided slack (comparison kinds)
  // where expr is the reward-difference expression of the bound theorem.
  double worst_theorem_margin = 0;
  int sandwich_witness_t = -1;
  Point sandwich_witness_n{};
  int theorem_witness_t = -1;
  Point theorem_witness_n{};
};

CertificateCheck check_certificate(const BoundCertificate& cert,
                                   const PerturbationPair& pair,
                                   const CLinearFn& F, int t_max = 100,
                                   int M = 150, double tol = 1e-9);

}  // namespace qpbound
