#include "twospike/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "twospike/errors.hpp"
#include "twospike/measures.hpp"
#include "twospike/rng.hpp"

namespace twospike {

double energy_per_n(const Spectrum& s, const std::vector<double>& eta) {
  require(eta.size() == s.lambda.size(), errc::dimension_mismatch,
          "state dimension does not match the spectrum");
  double e = 0.0;
  for (size_t i = 0; i < eta.size(); ++i) e += s.lambda[i] * eta[i] * eta[i];
  return 0.5 * e;
}

double energy(const Spectrum& s, const std::vector<double>& eta) {
  return static_cast<double>(s.n) * energy_per_n(s, eta);
}

namespace {

// Shared proposal core. de tracks H/n, so the acceptance exponent is
// beta_n * de with beta_n = beta * n.
inline bool rotate_once(double* eta, const double* lam, std::uint64_t n,
                        double beta_n, double sigma, std::mt19937_64& g,
                        std::normal_distribution<double>& gauss,
                        double& energy_acc) {
  std::uint64_t i = pick_index(g, n);
  std::uint64_t j = pick_index(g, n - 1);
  if (j >= i) ++j;
  double phi = gauss(g) * sigma;
  double sn = std::sin(phi), cs = std::cos(phi);
  double ei = eta[i], ej = eta[j];
  double ni = cs * ei - sn * ej;
  double nj = sn * ei + cs * ej;
  double de = 0.5 * (lam[i] * (ni * ni - ei * ei) + lam[j] * (nj * nj - ej * ej));
  if (de >= 0.0 || uniform01(g) < std::exp(beta_n * de)) {
    eta[i] = ni;
    eta[j] = nj;
    energy_acc += de;
    return true;
  }
  return false;
}

}  // namespace

bool mcmc_step(SphereState& state, const Spectrum& s, const ChainConfig& cfg,
               std::mt19937_64& rng) {
  require(state.eta.size() == s.lambda.size(), errc::dimension_mismatch,
          "state dimension does not match the spectrum");
  require(s.n >= 2, errc::domain, "rotation needs at least two coordinates");
  std::normal_distribution<double> gauss(0.0, 1.0);
  bool acc = rotate_once(state.eta.data(), s.lambda.data(),
                         static_cast<std::uint64_t>(s.n),
                         cfg.beta * static_cast<double>(s.n), cfg.step_sigma,
                         rng, gauss, state.energy_per_n);
  ++state.updates;
  return acc;
}

SphereState emit_sample(const SphereState& state, std::mt19937_64& rng) {
  SphereState out = state;
  size_t idx = 0;
  while (idx < out.eta.size()) {
    std::uint64_t bits = rng();
    for (int b = 0; b < 64 && idx < out.eta.size(); ++b, ++idx)
      if ((bits >> b) & 1U) out.eta[idx] = -out.eta[idx];
  }
  return out;
}

namespace {

void validate(const Spectrum& s, const ChainConfig& cfg) {
  require(s.n >= 2 && static_cast<int>(s.lambda.size()) == s.n, errc::dimension_mismatch,
          "spectrum is inconsistent");
  require(cfg.beta >= 0.0, errc::domain, "need beta >= 0");
  require(cfg.sweeps >= 0 && cfg.burnin >= 0, errc::domain, "negative sweep counts");
  require(cfg.thin >= 1, errc::domain, "need thin >= 1");
  require(cfg.chains >= 1, errc::domain, "need chains >= 1");
  require(cfg.step_sigma > 0.0, errc::domain, "need step_sigma > 0");
}

// Magnitude profile close to the stationary one: spike mass at 1 - 1/(beta J),
// the top-pair split drawn from its exact conditional, bulk exchangeable.
// Falls back to the uniform sphere outside the condensed regime.
std::vector<double> warm_eta(const Spectrum& s, double beta, std::mt19937_64& rng) {
  const int n = s.n;
  bool spiked = (s.mode == SpectrumMode::two_spike || s.mode == SpectrumMode::one_spike) &&
                s.J > 1.0 && beta * s.J > 1.0;
  if (!spiked) return sample_uniform_sphere(n, rng);

  double r0 = 1.0 - 1.0 / (beta * s.J);
  const int top = s.mode == SpectrumMode::two_spike ? 2 : 1;
  std::vector<double> eta(static_cast<size_t>(n));
  if (top == 2) {
    double tilt = 0.5 * s.c * beta;
    double e2 = sample_tilted_arcsine(make_tilted_arcsine(r0, tilt), rng);
    eta[0] = std::sqrt(r0 - e2);
    eta[1] = std::sqrt(e2);
  } else {
    eta[0] = std::sqrt(r0);
  }
  std::vector<double> alpha(static_cast<size_t>(n - top), 0.5);
  auto bulk = sample_dirichlet(alpha, rng);
  for (int i = top; i < n; ++i)
    eta[static_cast<size_t>(i)] = std::sqrt((1.0 - r0) * bulk[static_cast<size_t>(i - top)]);
  for (auto& v : eta)
    if (rng() >> 63) v = -v;
  return eta;
}

}  // namespace

Chain::Chain(const Spectrum& s, const ChainConfig& cfg) : s_(&s), cfg_(cfg) {
  validate(s, cfg);
  gen_ = make_stream(cfg.seed, cfg.chain_id, stream::chain);
  emit_gen_ = make_stream(cfg.seed, cfg.chain_id, stream::emission);
  auto warm_rng = make_stream(cfg.seed, cfg.chain_id, stream::warm_start);
  st_.eta = cfg.warm_start ? warm_eta(s, cfg.beta, warm_rng)
                           : sample_uniform_sphere(s.n, warm_rng);
  st_.energy_per_n = energy_per_n(s, st_.eta);
  sigma_ = cfg.step_sigma;
  log_sigma_ = std::log(sigma_);
}

double Chain::acceptance_rate() const {
  return proposals_ ? static_cast<double>(accepted_) / static_cast<double>(proposals_) : 0.0;
}

void Chain::renormalize() {
  double ss = 0.0;
  for (double v : st_.eta) ss += v * v;
  double inv = 1.0 / std::sqrt(ss);
  for (auto& v : st_.eta) v *= inv;
  st_.energy_per_n = energy_per_n(*s_, st_.eta);
}

void Chain::propose_block(long count, bool adapt) {
  const auto n = static_cast<std::uint64_t>(s_->n);
  const double* lam = s_->lambda.data();
  double* eta = st_.eta.data();
  const double beta_n = cfg_.beta * static_cast<double>(n);
  constexpr long kRenorm = 10000;
  constexpr long kAdaptBatch = 200;

  for (long t = 0; t < count; ++t) {
    if (rotate_once(eta, lam, n, beta_n, sigma_, gen_, gauss_, st_.energy_per_n)) {
      ++accepted_;
      ++batch_accepted_;
    }
    ++proposals_;
    if (++st_.updates % kRenorm == 0) {
      renormalize();
      eta = st_.eta.data();
    }
    if (adapt && ++batch_size_seen_ == kAdaptBatch) {
      double rate = static_cast<double>(batch_accepted_) / kAdaptBatch;
      ++adapt_batches_;
      double gain = 1.0 / std::pow(static_cast<double>(adapt_batches_), 0.6);
      log_sigma_ += gain * (rate - 0.4);
      log_sigma_ = std::clamp(log_sigma_, std::log(1e-4), std::log(1.5));
      sigma_ = std::exp(log_sigma_);
      batch_accepted_ = 0;
      batch_size_seen_ = 0;
    }
  }
}

void Chain::run_burnin() {
  propose_block(cfg_.burnin * s_->n, true);
}

void Chain::advance(long sweeps) {
  require(sweeps >= 0, errc::domain, "negative sweep count");
  propose_block(sweeps * s_->n, false);
}

SphereState Chain::emit() {
  return emit_sample(st_, emit_gen_);
}

std::vector<ChainRecord> run_chain(const Spectrum& s, const ChainConfig& cfg, int K) {
  require(cfg.burnin < cfg.sweeps, errc::domain, "burnin must be below sweeps");
  Chain chain(s, cfg);
  chain.run_burnin();
  long left = cfg.sweeps - cfg.burnin;
  std::vector<ChainRecord> out;
  out.reserve(static_cast<size_t>(left / cfg.thin));
  while (left >= cfg.thin) {
    chain.advance(cfg.thin);
    left -= cfg.thin;
    ChainRecord rec;
    rec.state = chain.emit();
    std::vector<double> sq(rec.state.eta.size());
    for (size_t i = 0; i < sq.size(); ++i) sq[i] = rec.state.eta[i] * rec.state.eta[i];
    rec.r = block_coarsen(sq, K);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<OverlapSample> sample_overlaps(const Spectrum& s, const ChainConfig& cfg,
                                           long pairs) {
  require(pairs >= 1, errc::domain, "need pairs >= 1");
  const int streams = std::max(1, cfg.chains / 2);
  std::vector<long> share(static_cast<size_t>(streams), pairs / streams);
  for (long p = 0; p < pairs % streams; ++p) ++share[static_cast<size_t>(p)];
  std::vector<long> offset(static_cast<size_t>(streams), 0);
  for (int p = 1; p < streams; ++p)
    offset[static_cast<size_t>(p)] = offset[static_cast<size_t>(p) - 1] + share[static_cast<size_t>(p) - 1];

  std::vector<OverlapSample> out(static_cast<size_t>(pairs));
#pragma omp parallel for schedule(dynamic)
  for (int p = 0; p < streams; ++p) {
    ChainConfig ca = cfg, cb = cfg;
    ca.chain_id = cfg.chain_id + 2 * static_cast<std::uint64_t>(p);
    cb.chain_id = ca.chain_id + 1;
    Chain a(s, ca), b(s, cb);
    a.run_burnin();
    b.run_burnin();
    for (long t = 0; t < share[static_cast<size_t>(p)]; ++t) {
      a.advance(cfg.thin);
      b.advance(cfg.thin);
      const auto ea = a.emit().eta, eb = b.emit().eta;
      OverlapSample smp;
      for (size_t i = 0; i < ea.size(); ++i) smp.ov += ea[i] * eb[i];
      smp.r0_1 = ea[0] * ea[0] + ea[1] * ea[1];
      smp.r0_2 = eb[0] * eb[0] + eb[1] * eb[1];
      smp.eta2sq_1 = ea[1] * ea[1];
      smp.eta2sq_2 = eb[1] * eb[1];
      out[static_cast<size_t>(offset[static_cast<size_t>(p)] + t)] = smp;
    }
  }
  return out;
}

EnergyEstimate estimate_mean_energy(const Spectrum& s, double beta,
                                    const ChainConfig& cfg) {
  ChainConfig c = cfg;
  c.beta = beta;
  constexpr int kBatches = 20;
  long measured = c.sweeps - c.burnin;
  require(measured >= kBatches, errc::domain,
          "need at least " + std::to_string(kBatches) + " measured sweeps");
  Chain chain(s, c);
  chain.run_burnin();
  const long per_batch = measured / kBatches;
  const long used = per_batch * kBatches;
  double total = 0.0;
  std::vector<double> batch_mean(kBatches, 0.0);
  for (long t = 0; t < used; ++t) {
    chain.advance(1);
    double e = chain.state().energy_per_n;
    total += e;
    batch_mean[static_cast<size_t>(t / per_batch)] += e;
  }
  EnergyEstimate est;
  est.beta = beta;
  est.batches = kBatches;
  est.mean = total / static_cast<double>(used);
  double var = 0.0;
  for (double& bm : batch_mean) {
    bm /= static_cast<double>(per_batch);
    var += (bm - est.mean) * (bm - est.mean);
  }
  est.std_error = std::sqrt(var / (kBatches * (kBatches - 1.0)));
  return est;
}

TiResult free_energy_ti(const Spectrum& s, double beta, int grid_points,
                        const ChainConfig& cfg) {
  require(beta > 0.0, errc::domain, "need beta > 0");
  require(grid_points >= 8, errc::domain, "need at least 8 grid points");
  TiResult res;
  res.grid.resize(static_cast<size_t>(grid_points) + 1);
  res.grid[0] = {0.0, 0.5 * s.trace() / s.n, 0.0};  // uniform-sphere average, exact

#pragma omp parallel for schedule(dynamic)
  for (int g = 1; g <= grid_points; ++g) {
    ChainConfig c = cfg;
    c.chain_id = cfg.chain_id + static_cast<std::uint64_t>(g);
    double bg = beta * g / grid_points;
    auto est = estimate_mean_energy(s, bg, c);
    res.grid[static_cast<size_t>(g)] = {bg, est.mean, est.std_error};
  }

  const double h = beta / grid_points;
  double acc = 0.0, var = 0.0;
  for (int g = 0; g <= grid_points; ++g) {
    double w = (g == 0 || g == grid_points) ? 0.5 : 1.0;
    acc += w * res.grid[static_cast<size_t>(g)].mean;
    var += w * w * res.grid[static_cast<size_t>(g)].std_error *
           res.grid[static_cast<size_t>(g)].std_error;
  }
  res.value = h * acc;
  res.std_error = h * std::sqrt(var);
  return res;
}

std::vector<Eta2Sample> conditional_eta2_samples(const std::vector<OverlapSample>& samples,
                                                 double r0_hat, double window) {
  require(window > 0.0, errc::domain, "need window > 0");
  std::vector<Eta2Sample> out;
  for (const auto& s : samples) {
    if (std::abs(s.r0_1 - r0_hat) <= window) out.push_back({s.r0_1, s.eta2sq_1});
    if (std::abs(s.r0_2 - r0_hat) <= window) out.push_back({s.r0_2, s.eta2sq_2});
  }
  require(!out.empty(), errc::empty_selection, "window matched no samples");
  return out;
}

const char* phase_name(Phase p) noexcept {
  switch (p) {
    case Phase::RS: return "RS";
    case Phase::kRSB: return "kRSB";
    case Phase::FullRSB: return "FullRSB";
  }
  return "unknown";
}

Classification classify_overlap(const std::vector<double>& abs_ov) {
  require(abs_ov.size() >= 1000, errc::domain, "need at least 1000 samples");
  const double m = static_cast<double>(abs_ov.size());
  double mean = 0.0;
  for (double v : abs_ov) mean += v;
  mean /= m;
  double var = 0.0;
  for (double v : abs_ov) var += (v - mean) * (v - mean);
  double sd = std::sqrt(var / (m - 1.0));

  Classification cls;
  cls.sd = sd;
  cls.bandwidth = 1.06 * std::max(sd, 1e-6) * std::pow(m, -0.2);

  constexpr double kTight = 0.05;
  if (sd < kTight) {
    cls.phase = Phase::RS;
    cls.k = 0;
    cls.modes = 1;
    return cls;
  }

  // Gaussian kernel density on a uniform grid; modes above 5% of the peak.
  double lo = *std::min_element(abs_ov.begin(), abs_ov.end()) - 3.0 * cls.bandwidth;
  double hi = *std::max_element(abs_ov.begin(), abs_ov.end()) + 3.0 * cls.bandwidth;
  constexpr int kGrid = 512;
  std::vector<double> dens(kGrid, 0.0);
  const double step = (hi - lo) / (kGrid - 1);
  const double inv_bw = 1.0 / cls.bandwidth;
  for (double v : abs_ov) {
    int first = std::max(0, static_cast<int>((v - 6.0 * cls.bandwidth - lo) / step));
    int last = std::min(kGrid - 1, static_cast<int>((v + 6.0 * cls.bandwidth - lo) / step) + 1);
    for (int g = first; g <= last; ++g) {
      double z = (lo + g * step - v) * inv_bw;
      dens[static_cast<size_t>(g)] += std::exp(-0.5 * z * z);
    }
  }
  double peak = *std::max_element(dens.begin(), dens.end());
  std::vector<double> mode_pos;
  std::vector<int> mode_idx;
  for (int g = 1; g + 1 < kGrid; ++g) {
    if (dens[static_cast<size_t>(g)] > dens[static_cast<size_t>(g) - 1] &&
        dens[static_cast<size_t>(g)] >= dens[static_cast<size_t>(g) + 1] &&
        dens[static_cast<size_t>(g)] >= 0.05 * peak) {
      mode_pos.push_back(lo + g * step);
      mode_idx.push_back(g);
    }
  }
  if (mode_pos.empty()) mode_pos.push_back(lo + step * (kGrid / 2));
  cls.modes = static_cast<int>(mode_pos.size());

  // Modes count as separated only when the density between neighbours dips
  // well below both peaks; ripples on one broad bump do not qualify.
  bool separated = cls.modes >= 2;
  for (size_t q = 1; separated && q < mode_idx.size(); ++q) {
    double valley = dens[static_cast<size_t>(mode_idx[q - 1])];
    for (int g = mode_idx[q - 1]; g <= mode_idx[q]; ++g)
      valley = std::min(valley, dens[static_cast<size_t>(g)]);
    double lower_peak = std::min(dens[static_cast<size_t>(mode_idx[q - 1])],
                                 dens[static_cast<size_t>(mode_idx[q])]);
    if (valley > 0.2 * lower_peak) separated = false;
  }

  if (separated) {
    // Point-mass check: every cluster around a mode must be tight and carry
    // real weight.
    std::vector<double> c_mean(mode_pos.size(), 0.0), c_var(mode_pos.size(), 0.0);
    std::vector<long> c_n(mode_pos.size(), 0);
    std::vector<int> who(abs_ov.size());
    for (size_t t = 0; t < abs_ov.size(); ++t) {
      size_t best = 0;
      for (size_t q = 1; q < mode_pos.size(); ++q)
        if (std::abs(abs_ov[t] - mode_pos[q]) < std::abs(abs_ov[t] - mode_pos[best]))
          best = q;
      who[t] = static_cast<int>(best);
      c_mean[best] += abs_ov[t];
      ++c_n[best];
    }
    bool tight = true;
    for (size_t q = 0; q < mode_pos.size(); ++q) {
      if (c_n[q] < static_cast<long>(0.05 * m)) {
        tight = false;
        break;
      }
      c_mean[q] /= static_cast<double>(c_n[q]);
    }
    if (tight) {
      for (size_t t = 0; t < abs_ov.size(); ++t) {
        double d = abs_ov[t] - c_mean[static_cast<size_t>(who[t])];
        c_var[static_cast<size_t>(who[t])] += d * d;
      }
      for (size_t q = 0; q < mode_pos.size(); ++q)
        if (std::sqrt(c_var[q] / std::max<long>(1, c_n[q] - 1)) >= kTight) {
          tight = false;
          break;
        }
    }
    if (tight) {
      cls.phase = Phase::kRSB;
      cls.k = cls.modes - 1;
      return cls;
    }
  }
  cls.phase = Phase::FullRSB;
  cls.k = -1;
  return cls;
}

}  // namespace twospike
