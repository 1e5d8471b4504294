#pragma once

#include "qpbound/model.hpp"

namespace qpbound::kernels {

// Transition probabilities flattened for the grid sweeps; direction index
// is (u1+1)*3 + (u2+1).
struct WalkKernel {
  double p[4][9] = {};
  static WalkKernel from(const RandomWalkSpec& w);
};

constexpr int dir_index(Step u) { return (u.u1 + 1) * 3 + (u.u2 + 1); }

// Grids are (M+1)^2 arrays, row-major with index n2*(M+1)+n1. Probability
// mass that would leave the box is folded into a self-loop.

// One synchronous update of the stationary equations: dst = src * P.
void stationary_sweep_serial(const WalkKernel& k, int M, const double* src,
                             double* dst);
void stationary_sweep_parallel(const WalkKernel& k, int M, const double* src,
                               double* dst);

// One value-iteration update: dst(n) = reward(n) + sum_u p_{k(n),u} src(n+u).
void value_sweep_serial(const WalkKernel& k, int M, const double* reward,
                        const double* src, double* dst);
void value_sweep_parallel(const WalkKernel& k, int M, const double* reward,
                          const double* src, double* dst);

// Row totals first, grand total second, in both the serial and parallel
// versions, so the two produce identical sums.
double sum_grid_serial(int M, const double* g);
double sum_grid_parallel(int M, const double* g);
double max_abs_diff_serial(int M, const double* a, const double* b);
double max_abs_diff_parallel(int M, const double* a, const double* b);

// Process-wide switch consulted by the dispatching wrappers below;
// QPBOUND_THREADS=1 disables parallel sweeps.
void set_parallelism(bool enabled);
bool parallelism_enabled();

void stationary_sweep(const WalkKernel& k, int M, const double* src, double* dst);
void value_sweep(const WalkKernel& k, int M, const double* reward,
                 const double* src, double* dst);
double sum_grid(int M, const double* g);
double max_abs_diff(int M, const double* a, const double* b);

}  // namespace qpbound::kernels
