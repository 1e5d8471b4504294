#include "qpbound/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qpbound/grid_kernels.hpp"

namespace qpbound {

using kernels::WalkKernel;

double TruncatedDistribution::at(Point n) const {
  if (n.n1 < 0 || n.n2 < 0 || n.n1 > M || n.n2 > M)
    throw Error("TruncatedDistribution: state outside the grid");
  return probs[n.n2 * (M + 1) + n.n1];
}

namespace {

// Balance residual of the original (untruncated) equations evaluated on the
// truncated grid; grows when probability mass piles up at the box boundary.
double untruncated_residual(const RandomWalkSpec& w, const std::vector<double>& pi,
                            int M) {
  double worst = 0;
  for (long n2 = 0; n2 <= M; ++n2)
    for (long n1 = 0; n1 <= M; ++n1) {
      Point n{n1, n2};
      double acc = pi[n2 * (M + 1) + n1];
      for (Step u : neighborhood(component_of(n))) {
        Point m = n + u;
        if (m.n1 > M || m.n2 > M) continue;
        acc -= w.p(component_of(m), -u) * pi[m.n2 * (M + 1) + m.n1];
      }
      worst = std::max(worst, std::abs(acc));
    }
  return worst;
}

}  // namespace

TruncatedDistribution stationary_truncated(const RandomWalkSpec& w, int M,
                                           double tol, long max_sweeps,
                                           const TruncatedDistribution* warm) {
  if (M < 3) throw Error("stationary_truncated: truncation too small");
  const long N = long(M + 1) * (M + 1);
  WalkKernel kernel = WalkKernel::from(w);

  TruncatedDistribution out;
  out.M = M;
  out.probs.assign(N, 0.0);
  if (warm && warm->M <= M) {
    for (long n2 = 0; n2 <= warm->M; ++n2)
      for (long n1 = 0; n1 <= warm->M; ++n1)
        out.probs[n2 * (M + 1) + n1] = warm->probs[n2 * (warm->M + 1) + n1];
    double s = kernels::sum_grid(M, out.probs.data());
    for (double& v : out.probs) v /= s;
  } else {
    std::fill(out.probs.begin(), out.probs.end(), 1.0 / double(N));
  }

  std::vector<double> next(N);
  for (long sweep = 1; sweep <= max_sweeps; ++sweep) {
    kernels::stationary_sweep(kernel, M, out.probs.data(), next.data());
    double s = kernels::sum_grid(M, next.data());
    for (double& v : next) v /= s;
    double diff = kernels::max_abs_diff(M, out.probs.data(), next.data());
    out.probs.swap(next);
    out.sweeps = sweep;
    if (diff < tol) {
      out.converged = true;
      break;
    }
  }
  out.residual = untruncated_residual(w, out.probs, M);
  if (!out.converged)
    throw Error("stationary_truncated: no convergence within " +
                std::to_string(max_sweeps) + " sweeps (M=" + std::to_string(M) +
                "); the walk may not be ergodic at this truncation");
  return out;
}

SteadyStateValue steady_state_value(const RandomWalkSpec& w, const CLinearFn& F,
                                    double tol, int initial_M, int max_M) {
  auto value_of = [&](const TruncatedDistribution& d) {
    // Row totals first for reproducibility, like the grid kernels.
    double total = 0;
    for (long n2 = 0; n2 <= d.M; ++n2) {
      double row = 0;
      for (long n1 = 0; n1 <= d.M; ++n1)
        row += d.probs[n2 * (d.M + 1) + n1] * F.evaluate({n1, n2});
      total += row;
    }
    return total;
  };

  TruncatedDistribution dist = stationary_truncated(w, initial_M);
  double value = value_of(dist);
  for (int M = initial_M * 2; M <= max_M; M *= 2) {
    TruncatedDistribution finer = stationary_truncated(w, M, 1e-12, 200000, &dist);
    double refined = value_of(finer);
    double delta = std::abs(refined - value);
    if (delta < tol) return {refined, delta, M};
    dist = std::move(finer);
    value = refined;
  }
  throw Error("steady_state_value: truncation did not settle below tolerance " +
              std::to_string(tol) + " at M <= " + std::to_string(max_M));
}

BiasIterator::BiasIterator(const RandomWalkSpec& w, const CLinearFn& F, int M)
    : M_(M), kernel_(WalkKernel::from(w)) {
  if (M < 2) throw Error("BiasIterator: grid too small");
  const long N = long(M + 1) * (M + 1);
  reward_.resize(N);
  for (long n2 = 0; n2 <= M; ++n2)
    for (long n1 = 0; n1 <= M; ++n1)
      reward_[n2 * (M + 1) + n1] = F.evaluate({n1, n2});
  cur_.assign(N, 0.0);  // F^0 = 0
  buf_.resize(N);
}

void BiasIterator::step() {
  kernels::value_sweep(kernel_, M_, reward_.data(), cur_.data(), buf_.data());
  cur_.swap(buf_);
  ++t_;
}

double BiasField::d(int i, Point n) const {
  if (n.n1 < 0 || n.n2 < 0 || n.n1 > safe_extent || n.n2 > safe_extent)
    throw Error("BiasField: state outside the safe region");
  const std::vector<double>& g = i == 1 ? d1 : d2;
  return g[n.n2 * (safe_extent + 1) + n.n1];
}

BiasField bias_field(const RandomWalkSpec& w, const CLinearFn& F, int t, int M) {
  if (M < t + 2)
    throw Error("bias_field: truncation M too small for horizon t");
  BiasIterator iter(w, F, M);
  for (int s = 0; s < t; ++s) iter.step();
  BiasField out;
  out.t = t;
  out.M = M;
  out.safe_extent = long(M) - t - 1;
  const long W = out.safe_extent + 1;
  out.d1.resize(W * W);
  out.d2.resize(W * W);
  for (long n2 = 0; n2 < W; ++n2)
    for (long n1 = 0; n1 < W; ++n1) {
      out.d1[n2 * W + n1] = iter.d(1, {n1, n2});
      out.d2[n2 * W + n1] = iter.d(2, {n1, n2});
    }
  return out;
}

CertificateCheck check_certificate(const BoundCertificate& cert,
                                   const PerturbationPair& pair,
                                   const CLinearFn& F, int t_max, int M,
                                   double tol) {
  if (M < t_max + 10)
    throw Error("check_certificate: M too small for the requested horizon");
  CertificateCheck out;
  out.worst_sandwich_margin = std::numeric_limits<double>::infinity();
  out.worst_theorem_margin = std::numeric_limits<double>::infinity();

  const CLinearFn* a_fns[2] = {&cert.a1, &cert.a2};
  const CLinearFn* b_fns[2] = {&cert.b1, &cert.b2};
  const bool two_sided = is_error_kind(cert.kind);
  const bool upper = is_upper_kind(cert.kind);

  BiasIterator iter(pair.original, F, M);
  for (int t = 0; t <= t_max; ++t) {
    if (t > 0) iter.step();
    const long extent = long(M) - t - 1;
    for (long n2 = 0; n2 <= extent; ++n2)
      for (long n1 = 0; n1 <= extent; ++n1) {
        Point n{n1, n2};
        for (int i = 1; i <= 2; ++i) {
          double d = iter.d(i, n);
          double lo = d + a_fns[i - 1]->evaluate(n);
          double hi = b_fns[i - 1]->evaluate(n) - d;
          double margin = std::min(lo, hi);
          if (margin < out.worst_sandwich_margin) {
            out.worst_sandwich_margin = margin;
            out.sandwich_witness_t = t;
            out.sandwich_witness_n = n;
          }
        }
        int k = component_of(n);
        double expr = cert.fbar.evaluate(n) - F.evaluate(n);
        for (Step u : neighborhood(k)) {
          if (u == kZero) continue;
          double q = pair.q(k, u);
          if (q != 0.0) expr += q * iter.d(u, n);
        }
        double margin;
        if (two_sided)
          margin = cert.g.evaluate(n) - std::abs(expr);
        else
          margin = upper ? expr : -expr;
        if (margin < out.worst_theorem_margin) {
          out.worst_theorem_margin = margin;
          out.theorem_witness_t = t;
          out.theorem_witness_n = n;
        }
      }
  }
  out.ok = std::min(out.worst_sandwich_margin, out.worst_theorem_margin) >= -tol;
  return out;
}

}  // namespace qpbound
