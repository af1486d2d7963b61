#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "twospike/spectrum.hpp"

namespace twospike {

struct SphereState {
  std::vector<double> eta;     // signed coordinates, unit norm
  double energy_per_n = 0.0;   // H / n, maintained incrementally
  long updates = 0;
};

struct ChainConfig {
  double beta = 1.0;
  long sweeps = 10000;   // one sweep = n proposals
  long burnin = 1000;
  long thin = 10;        // sweeps between emissions
  int chains = 1;
  std::uint64_t seed = 1;
  std::uint64_t chain_id = 0;
  double step_sigma = 0.5;  // initial rotation angle scale
  bool warm_start = true;   // start magnitudes near the stationary profile
};

double energy(const Spectrum& s, const std::vector<double>& eta);  // (n/2) sum lambda_i eta_i^2
double energy_per_n(const Spectrum& s, const std::vector<double>& eta);

// One Givens-rotation Metropolis update: rotate a uniformly random pair by
// an N(0, cfg.step_sigma^2) angle, accept with min(1, exp(beta dH)). The
// norm is preserved exactly; no renormalization happens here. Returns
// whether the proposal was accepted.
bool mcmc_step(SphereState& state, const Spectrum& s, const ChainConfig& cfg,
               std::mt19937_64& rng);

// Copy of the state with every sign refreshed by a fair coin; squared
// coordinates (and the energy) are untouched.
SphereState emit_sample(const SphereState& state, std::mt19937_64& rng);

// Metropolis walk on the sphere: a uniformly random coordinate pair is
// rotated by an N(0, sigma^2) angle, which preserves the norm exactly; the
// energy update is O(1). The angle scale adapts toward 40% acceptance during
// burn-in and is frozen afterwards. The state renormalizes (and recomputes
// the energy) every 10^4 proposals to stop drift.
class Chain {
 public:
  Chain(const Spectrum& s, const ChainConfig& cfg);

  void run_burnin();           // cfg.burnin sweeps with step adaptation
  void advance(long sweeps);   // frozen step scale

  // emit_sample driven by a dedicated stream; the walk's stream is untouched.
  SphereState emit();

  const SphereState& state() const { return st_; }
  const Spectrum& spectrum() const { return *s_; }
  double sigma() const { return sigma_; }
  double acceptance_rate() const;

 private:
  void propose_block(long proposals, bool adapt);
  void renormalize();

  const Spectrum* s_;
  ChainConfig cfg_;
  SphereState st_;
  std::mt19937_64 gen_, emit_gen_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
  double sigma_ = 0.5;
  double log_sigma_ = 0.0;
  long proposals_ = 0, accepted_ = 0;
  long adapt_batches_ = 0, batch_accepted_ = 0, batch_size_seen_ = 0;
};

struct ChainRecord {
  SphereState state;      // emitted (sign-randomized) snapshot
  std::vector<double> r;  // coarse profile (r_0, r_1, ..., r_K)
};

// Burn in, then emit every cfg.thin sweeps until cfg.sweeps total sweeps ran.
std::vector<ChainRecord> run_chain(const Spectrum& s, const ChainConfig& cfg, int K = 1);

struct OverlapSample {
  double ov = 0.0;
  double r0_1 = 0.0, r0_2 = 0.0;
  double eta2sq_1 = 0.0, eta2sq_2 = 0.0;
};

// Overlaps of paired independent replicas. cfg.chains / 2 pair streams run
// independently (OpenMP across streams; the output does not depend on the
// thread count), each contributing an equal share of 'pairs'. cfg.sweeps is
// ignored here; cfg.burnin and cfg.thin control the schedule.
std::vector<OverlapSample> sample_overlaps(const Spectrum& s, const ChainConfig& cfg,
                                           long pairs);

struct EnergyEstimate {
  double beta = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  int batches = 0;
};

// Batch-means estimate of <H/n> from one chain measured every sweep.
EnergyEstimate estimate_mean_energy(const Spectrum& s, double beta,
                                    const ChainConfig& cfg);

struct TiPoint {
  double beta = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
};

struct TiResult {
  double value = 0.0;      // F(beta) / n
  double std_error = 0.0;  // propagated from the grid estimates
  std::vector<TiPoint> grid;
};

// Thermodynamic integration of <H/n> from 0 to beta on a uniform grid of
// grid_points Monte Carlo points plus the exact beta = 0 endpoint
// (trapezoid rule; grid points run in parallel on their own streams).
TiResult free_energy_ti(const Spectrum& s, double beta, int grid_points,
                        const ChainConfig& cfg);

struct Eta2Sample {
  double r0 = 0.0;
  double eta2sq = 0.0;
};

// Pulls (r0, eta_2^2) from both replicas of each overlap sample, keeping
// entries with |r0 - r0_hat| <= window.
std::vector<Eta2Sample> conditional_eta2_samples(const std::vector<OverlapSample>& samples,
                                                 double r0_hat, double window);

enum class Phase { RS, kRSB, FullRSB };

const char* phase_name(Phase p) noexcept;

struct Classification {
  Phase phase = Phase::RS;
  int k = 0;          // number of breaks when phase == kRSB, else -1 / 0
  double sd = 0.0;    // overall spread of |Ov|
  int modes = 0;      // kernel density modes
  double bandwidth = 0.0;
};

// Heuristic phase call from |Ov| samples: tight single cluster means RS,
// a few well-separated tight clusters mean kRSB, anything broad means
// FullRSB.
Classification classify_overlap(const std::vector<double>& abs_ov);

}  // namespace twospike
