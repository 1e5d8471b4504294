#include "qpbound/grid_kernels.hpp"

#include <atomic>
#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qpbound::kernels {

WalkKernel WalkKernel::from(const RandomWalkSpec& w) {
  WalkKernel k;
  for (int comp = 1; comp <= 4; ++comp)
    for (Step u : neighborhood(comp)) k.p[comp - 1][dir_index(u)] = w.p(comp, u);
  return k;
}

namespace {

std::atomic<bool> g_parallel{true};

inline long idx(int M, long n1, long n2) { return n2 * (M + 1) + n1; }

inline int comp_of(long n1, long n2) {
  if (n1 == 0 && n2 == 0) return 3;
  if (n2 == 0) return 1;
  if (n1 == 0) return 2;
  return 4;
}

// dst(n) for one row of the synchronous stationary update. Sources are the
// nine neighbors m = n + o contributing src(m) * p_{k(m), -o}; mass of n
// that would exit the box stays at n.
void stationary_row(const WalkKernel& K, int M, long n2, const double* src,
                    double* dst) {
  const long W = M + 1;
  const double* p4 = K.p[3];
  if (n2 >= 2 && n2 <= M - 1) {
    // Middle rows: columns 2..M-1 see interior sources only and no escape.
    double wrev[9];
    for (Step o : kAllSteps) wrev[dir_index(o)] = p4[dir_index(-o)];
    for (long n1 = 2; n1 <= M - 1; ++n1) {
      const double* base = src + idx(M, n1, n2);
      double acc = 0;
      for (int o1 = -1; o1 <= 1; ++o1)
        for (int o2 = -1; o2 <= 1; ++o2)
          acc += base[o2 * W + o1] * wrev[(o1 + 1) * 3 + (o2 + 1)];
      dst[idx(M, n1, n2)] = acc;
    }
  }
  for (long n1 = 0; n1 <= M; ++n1) {
    if (n2 >= 2 && n2 <= M - 1 && n1 >= 2 && n1 <= M - 1) continue;
    int kn = comp_of(n1, n2);
    double acc = 0;
    for (Step o : kAllSteps) {
      if (o == kZero) continue;
      long m1 = n1 + o.u1, m2 = n2 + o.u2;
      if (m1 < 0 || m2 < 0 || m1 > M || m2 > M) continue;
      acc += src[idx(M, m1, m2)] * K.p[comp_of(m1, m2) - 1][dir_index(-o)];
    }
    double self = K.p[kn - 1][dir_index(kZero)];
    if (n1 == M || n2 == M) {
      for (Step u : kAllSteps) {
        if (u == kZero) continue;
        long t1 = n1 + u.u1, t2 = n2 + u.u2;
        if ((t1 > M || t2 > M) && t1 >= 0 && t2 >= 0)
          self += K.p[kn - 1][dir_index(u)];
      }
    }
    dst[idx(M, n1, n2)] = acc + self * src[idx(M, n1, n2)];
  }
}

void value_row(const WalkKernel& K, int M, long n2, const double* reward,
               const double* src, double* dst) {
  const long W = M + 1;
  const double* p4 = K.p[3];
  if (n2 >= 1 && n2 <= M - 1) {
    for (long n1 = 1; n1 <= M - 1; ++n1) {
      const double* base = src + idx(M, n1, n2);
      double acc = reward[idx(M, n1, n2)];
      for (int o1 = -1; o1 <= 1; ++o1)
        for (int o2 = -1; o2 <= 1; ++o2)
          acc += p4[(o1 + 1) * 3 + (o2 + 1)] * base[o2 * W + o1];
      dst[idx(M, n1, n2)] = acc;
    }
  }
  for (long n1 = 0; n1 <= M; ++n1) {
    if (n2 >= 1 && n2 <= M - 1 && n1 >= 1 && n1 <= M - 1) continue;
    int kn = comp_of(n1, n2);
    double acc = reward[idx(M, n1, n2)];
    double self = K.p[kn - 1][dir_index(kZero)];
    for (Step u : kAllSteps) {
      if (u == kZero) continue;
      double p = K.p[kn - 1][dir_index(u)];
      if (p == 0) continue;
      long t1 = n1 + u.u1, t2 = n2 + u.u2;
      if (t1 < 0 || t2 < 0) continue;
      if (t1 > M || t2 > M)
        self += p;  // would exit the box
      else
        acc += p * src[idx(M, t1, t2)];
    }
    dst[idx(M, n1, n2)] = acc + self * src[idx(M, n1, n2)];
  }
}

}  // namespace

void stationary_sweep_serial(const WalkKernel& k, int M, const double* src,
                             double* dst) {
  for (long n2 = 0; n2 <= M; ++n2) stationary_row(k, M, n2, src, dst);
}

void stationary_sweep_parallel(const WalkKernel& k, int M, const double* src,
                               double* dst) {
#pragma omp parallel for schedule(static)
  for (long n2 = 0; n2 <= M; ++n2) stationary_row(k, M, n2, src, dst);
}

void value_sweep_serial(const WalkKernel& k, int M, const double* reward,
                        const double* src, double* dst) {
  for (long n2 = 0; n2 <= M; ++n2) value_row(k, M, n2, reward, src, dst);
}

void value_sweep_parallel(const WalkKernel& k, int M, const double* reward,
                          const double* src, double* dst) {
#pragma omp parallel for schedule(static)
  for (long n2 = 0; n2 <= M; ++n2) value_row(k, M, n2, reward, src, dst);
}

double sum_grid_serial(int M, const double* g) {
  std::vector<double> rows(M + 1);
  for (long n2 = 0; n2 <= M; ++n2) {
    double acc = 0;
    for (long n1 = 0; n1 <= M; ++n1) acc += g[n2 * (M + 1) + n1];
    rows[n2] = acc;
  }
  double total = 0;
  for (double r : rows) total += r;
  return total;
}

double sum_grid_parallel(int M, const double* g) {
  std::vector<double> rows(M + 1);
#pragma omp parallel for schedule(static)
  for (long n2 = 0; n2 <= M; ++n2) {
    double acc = 0;
    for (long n1 = 0; n1 <= M; ++n1) acc += g[n2 * (M + 1) + n1];
    rows[n2] = acc;
  }
  double total = 0;
  for (double r : rows) total += r;
  return total;
}

double max_abs_diff_serial(int M, const double* a, const double* b) {
  double worst = 0;
  for (long i = 0; i < long(M + 1) * (M + 1); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

double max_abs_diff_parallel(int M, const double* a, const double* b) {
  double worst = 0;
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (long i = 0; i < long(M + 1) * (M + 1); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

void set_parallelism(bool enabled) { g_parallel.store(enabled); }

bool parallelism_enabled() {
#ifdef _OPENMP
  return g_parallel.load();
#else
  return false;
#endif
}

void stationary_sweep(const WalkKernel& k, int M, const double* src, double* dst) {
  if (parallelism_enabled())
    stationary_sweep_parallel(k, M, src, dst);
  else
    stationary_sweep_serial(k, M, src, dst);
}

void value_sweep(const WalkKernel& k, int M, const double* reward,
                 const double* src, double* dst) {
  if (parallelism_enabled())
    value_sweep_parallel(k, M, reward, src, dst);
  else
    value_sweep_serial(k, M, reward, src, dst);
}

double sum_grid(int M, const double* g) {
  return parallelism_enabled() ? sum_grid_parallel(M, g) : sum_grid_serial(M, g);
}

double max_abs_diff(int M, const double* a, const double* b) {
  return parallelism_enabled() ? max_abs_diff_parallel(M, a, b)
                               : max_abs_diff_serial(M, a, b);
}

}  // namespace qpbound::kernels
