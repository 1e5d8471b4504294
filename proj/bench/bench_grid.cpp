// Compares the serial reference sweeps with the OpenMP kernels on a large
// grid and checks that both produce identical iterates.
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "qpbound/grid_kernels.hpp"
#include "qpbound/model.hpp"

using namespace qpbound;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  int M = argc > 1 ? std::atoi(argv[1]) : 400;
  int sweeps = argc > 2 ? std::atoi(argv[2]) : 200;
  RandomWalkSpec walk = joint_departures(0.15, 0.15, 0.7, 0.28, 0.28);
  kernels::WalkKernel K = kernels::WalkKernel::from(walk);

  const long N = long(M + 1) * (M + 1);
  std::vector<double> a(N), b(N), reward(N);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (long i = 0; i < N; ++i) {
    a[i] = unif(rng);
    reward[i] = unif(rng);
  }
  std::vector<double> serial_state = a, parallel_state = a;

  auto t0 = Clock::now();
  for (int s = 0; s < sweeps; ++s) {
    kernels::stationary_sweep_serial(K, M, serial_state.data(), b.data());
    serial_state.swap(b);
  }
  double serial_time = seconds_since(t0);

  t0 = Clock::now();
  for (int s = 0; s < sweeps; ++s) {
    kernels::stationary_sweep_parallel(K, M, parallel_state.data(), b.data());
    parallel_state.swap(b);
  }
  double parallel_time = seconds_since(t0);

  double diff =
      kernels::max_abs_diff_serial(M, serial_state.data(), parallel_state.data());

  std::printf("grid %dx%d, %d stationary sweeps\n", M + 1, M + 1, sweeps);
  std::printf("  serial:   %8.3f s\n", serial_time);
  std::printf("  parallel: %8.3f s  (speedup %.2fx)\n", parallel_time,
              serial_time / parallel_time);
  std::printf("  max |serial - parallel| = %g\n", diff);

  t0 = Clock::now();
  for (int s = 0; s < sweeps; ++s) {
    kernels::value_sweep_serial(K, M, reward.data(), serial_state.data(), b.data());
    serial_state.swap(b);
  }
  serial_time = seconds_since(t0);
  t0 = Clock::now();
  for (int s = 0; s < sweeps; ++s) {
    kernels::value_sweep_parallel(K, M, reward.data(), parallel_state.data(),
                                  b.data());
    parallel_state.swap(b);
  }
  parallel_time = seconds_since(t0);
  diff = kernels::max_abs_diff_serial(M, serial_state.data(),
                                      parallel_state.data());
  std::printf("value sweeps: serial %.3f s, parallel %.3f s (speedup %.2fx), "
              "max diff %g\n",
              serial_time, parallel_time, serial_time / parallel_time, diff);
  return diff == 0.0 ? 0 : 1;
}
