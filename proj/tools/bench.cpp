// Timing harness: OpenMP eigensolve against the serial path, plus raw
// Metropolis proposal throughput. Not a test; numbers go to stdout.
#include <chrono>
#include <cstdio>
#include <random>

#include "twospike/gibbs.hpp"
#include "twospike/rng.hpp"
#include "twospike/spectrum.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace twospike;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void bench_eigensolve(int n) {
  auto rng = make_stream(7, 0, stream::goe);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> d(static_cast<size_t>(n)), e(static_cast<size_t>(n) - 1);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& v : d) v = std::sqrt(2.0) * gauss(rng) * inv_sqrt_n;
  for (int i = 1; i < n; ++i) {
    std::gamma_distribution<double> g(0.5 * (n - i), 2.0);
    e[static_cast<size_t>(i) - 1] = std::sqrt(g(rng)) * inv_sqrt_n;
  }

  auto t0 = std::chrono::steady_clock::now();
  auto serial = tridiag_eigenvalues(d, e, false);
  double ts = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  auto parallel = tridiag_eigenvalues(d, e, true);
  double tp = seconds_since(t0);

  double diff = 0.0;
  for (size_t i = 0; i < serial.size(); ++i)
    diff = std::max(diff, std::abs(serial[i] - parallel[i]));
  std::printf("eigensolve n=%d: serial %.3fs, parallel %.3fs, speedup %.2fx, max |diff| %.3g\n",
              n, ts, tp, ts / tp, diff);
}

void bench_proposals(int n, long proposals) {
  Spectrum s = build_two_spike(n, 2.0, 2.0);
  ChainConfig cfg;
  cfg.beta = 1.0;
  cfg.seed = 11;
  Chain chain(s, cfg);
  long sweeps = proposals / n;
  auto t0 = std::chrono::steady_clock::now();
  chain.advance(sweeps);
  double t = seconds_since(t0);
  std::printf("proposals n=%d: %.2e proposals in %.3fs (%.1f ns each, acceptance %.3f)\n",
              n, static_cast<double>(sweeps) * n, t,
              1e9 * t / (static_cast<double>(sweeps) * n), chain.acceptance_rate());
}

void bench_pair_streams(int n, long pairs) {
  Spectrum s = build_two_spike(n, 2.0, 2.0);
  ChainConfig cfg;
  cfg.beta = 1.0;
  cfg.burnin = 200;
  cfg.thin = 50;
  cfg.chains = 8;
  cfg.seed = 11;
  auto t0 = std::chrono::steady_clock::now();
  auto smp = sample_overlaps(s, cfg, pairs);
  double t = seconds_since(t0);
  std::printf("overlap pairs n=%d: %ld pairs in %.3fs (first ov %.4f)\n", n,
              pairs, t, smp.front().ov);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled\n");
#endif
  bench_eigensolve(2000);
  bench_proposals(1000, 20000000);
  bench_pair_streams(500, 64);
  return 0;
}
