// Experiment driver: every numeric parameter lives in a JSON config; flags
// select only the config file, output directory, strictness, and threads.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "twospike/errors.hpp"
#include "twospike/gibbs.hpp"
#include "twospike/limit_laws.hpp"
#include "twospike/oracle.hpp"
#include "twospike/rng.hpp"
#include "twospike/semicircle.hpp"
#include "twospike/spectrum.hpp"
#include "twospike/variational.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using nlohmann::json;
using namespace twospike;

namespace {

// Config problems exit with code 2 and always name the offending field.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const json* find_path(const json& root, const std::string& path) {
  const json* node = &root;
  size_t start = 0;
  while (start <= path.size()) {
    size_t dot = path.find('.', start);
    std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (!node->is_object() || !node->contains(key)) return nullptr;
    node = &(*node)[key];
    if (dot == std::string::npos) return node;
    start = dot + 1;
  }
  return nullptr;
}

template <typename T>
T get_field(const json& root, const std::string& path) {
  const json* node = find_path(root, path);
  if (!node) throw ConfigError("missing field: " + path);
  try {
    return node->get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for field: " + path);
  }
}

template <typename T>
T get_or(const json& root, const std::string& path, T fallback) {
  const json* node = find_path(root, path);
  if (!node) return fallback;
  try {
    return node->get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for field: " + path);
  }
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Run {
  json cfg;
  std::filesystem::path out_dir;
  bool strict = false;
  std::uint64_t seed = 1;
  json result;
  std::vector<std::string> warnings;
  std::vector<std::string> outputs;

  std::ofstream open_csv(const std::string& name) {
    std::filesystem::create_directories(out_dir);
    std::ofstream f(out_dir / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write to outputs.directory: " + (out_dir / name).string());
    outputs.push_back(name);
    return f;
  }
};

Spectrum spectrum_from_config(Run& run) {
  std::string mode = get_or<std::string>(run.cfg, "model.mode", "two_spike");
  int n = get_field<int>(run.cfg, "model.n");
  if (mode == "two_spike") {
    double J = get_field<double>(run.cfg, "model.J");
    double c = get_field<double>(run.cfg, "model.c");
    return build_two_spike(n, J, c);
  }
  if (mode == "one_spike") {
    double J = get_field<double>(run.cfg, "model.J");
    return build_one_spike(n, J);
  }
  if (mode == "goe") {
    auto rng = make_stream(run.seed, 0, stream::goe);
    return sample_goe(n, rng);
  }
  throw ConfigError("bad value for field: model.mode");
}

ChainConfig chain_config_from(const Run& run) {
  ChainConfig cfg;
  cfg.beta = get_field<double>(run.cfg, "model.beta");
  cfg.sweeps = get_or<long>(run.cfg, "mcmc.sweeps", 10000);
  cfg.burnin = get_or<long>(run.cfg, "mcmc.burnin", 1000);
  cfg.thin = get_or<long>(run.cfg, "mcmc.thin", 10);
  cfg.chains = get_or<int>(run.cfg, "mcmc.chains", 2);
  cfg.seed = get_or<std::uint64_t>(run.cfg, "mcmc.seed", 1);
  cfg.step_sigma = get_or<double>(run.cfg, "mcmc.step_sigma", 0.5);
  cfg.warm_start = get_or<bool>(run.cfg, "mcmc.warm_start", true);
  return cfg;
}

void write_overlaps_csv(Run& run, const std::vector<OverlapSample>& smp) {
  auto f = run.open_csv("overlaps.csv");
  f << "pair_id,ov,r0_1,r0_2,eta2sq_1,eta2sq_2\n";
  for (size_t i = 0; i < smp.size(); ++i)
    f << i << ',' << g17(smp[i].ov) << ',' << g17(smp[i].r0_1) << ','
      << g17(smp[i].r0_2) << ',' << g17(smp[i].eta2sq_1) << ','
      << g17(smp[i].eta2sq_2) << '\n';
}

void cmd_spectrum_build(Run& run) {
  Spectrum s = spectrum_from_config(run);
  std::filesystem::create_directories(run.out_dir);
  save_spectrum(s, (run.out_dir / "spectrum.txt").string());
  run.outputs.push_back("spectrum.txt");
  run.result["n"] = s.n;
  run.result["mode"] = mode_name(s.mode);
  run.result["top"] = s.top();
  run.result["trace_over_n"] = s.trace() / s.n;
  if (find_path(run.cfg, "discretization.K")) {
    int K = get_field<int>(run.cfg, "discretization.K");
    double eps = get_field<double>(run.cfg, "discretization.epsilon");
    auto rep = check_rigidity(s, K, eps);
    run.result["rigidity"] = {{"K", rep.K},
                              {"epsilon", rep.epsilon},
                              {"worst", rep.worst},
                              {"worst_block", rep.worst_block},
                              {"pass", rep.pass}};
    if (!rep.pass) run.warnings.push_back("rigidity check failed");
  }
}

void cmd_variational_solve(Run& run) {
  int K = get_field<int>(run.cfg, "discretization.K");
  double beta = get_field<double>(run.cfg, "model.beta");
  double J = get_field<double>(run.cfg, "model.J");
  auto p = make_variational(K, beta, J);
  auto sol = solve_lagrange(p);
  double limit = free_energy_limit(beta, J);
  auto f = run.open_csv("variational.csv");
  f << "K,beta,J,r0_hat,f_opt,limit,abs_gap,stieltjes_err\n";
  f << K << ',' << g17(beta) << ',' << g17(J) << ',' << g17(sol.r_hat[0]) << ','
    << g17(sol.f_opt) << ',' << g17(limit) << ','
    << g17(std::abs(sol.f_opt - limit)) << ',' << g17(sol.stieltjes_err) << '\n';
  run.result["r0_hat"] = sol.r_hat[0];
  run.result["f_opt"] = sol.f_opt;
  run.result["limit"] = limit;
  run.result["abs_gap"] = std::abs(sol.f_opt - limit);
  run.result["stieltjes_err"] = sol.stieltjes_err;
  run.result["kkt_residual"] = sol.kkt_residual;
  run.result["gamma"] = sol.gamma;
}

void cmd_variational_gap(Run& run) {
  int K = get_field<int>(run.cfg, "discretization.K");
  double beta = get_field<double>(run.cfg, "model.beta");
  double J = get_field<double>(run.cfg, "model.J");
  auto deltas = get_or<std::vector<double>>(run.cfg, "gap.deltas", {0.002, 0.005, 0.01});
  int per = get_or<int>(run.cfg, "gap.samples_per_delta", 1000);
  auto p = make_variational(K, beta, J);
  auto sol = solve_lagrange(p);
  auto rng = make_stream(run.seed, 0, stream::gap_scan);
  auto rep = gap_scan(p, sol, deltas, per, rng);
  auto f = run.open_csv("gap.csv");
  f << "delta,samples,violations,worst_margin,gamma_fit\n";
  for (const auto& st : rep.per_delta)
    f << g17(st.delta) << ',' << st.samples << ',' << st.violations << ','
      << g17(st.worst_margin) << ',' << g17(st.gamma_fit) << '\n';
  run.result["gamma_fit"] = rep.gamma_fit;
  run.result["violations"] = rep.violations;
  run.result["worst_margin"] = rep.worst_margin;
}

void cmd_variational_profile(Run& run) {
  double beta = get_field<double>(run.cfg, "model.beta");
  double J = get_field<double>(run.cfg, "model.J");
  int pts = get_or<int>(run.cfg, "profile.grid_points", 512);
  auto prof = profile_tilde_f(beta, J, pts);
  auto f = run.open_csv("profile.csv");
  f << "r0,tilde_f,branch\n";
  for (const auto& pt : prof.points)
    f << g17(pt.r0) << ',' << g17(pt.value) << ',' << pt.branch << '\n';
  run.result["argmax_r0"] = prof.argmax_r0;
  run.result["max_value"] = prof.max_value;
}

void cmd_mcmc_sample(Run& run) {
  Spectrum s = spectrum_from_config(run);
  ChainConfig cfg = chain_config_from(run);
  long pairs = get_or<long>(run.cfg, "overlap.pairs", 1000);
  auto smp = sample_overlaps(s, cfg, pairs);
  write_overlaps_csv(run, smp);
  std::vector<double> abs_ov(smp.size());
  double mean = 0.0;
  for (size_t i = 0; i < smp.size(); ++i) {
    abs_ov[i] = std::abs(smp[i].ov);
    mean += abs_ov[i];
  }
  mean /= static_cast<double>(smp.size());
  run.result["pairs"] = pairs;
  run.result["mean_abs_ov"] = mean;
  if (smp.size() >= 1000) {
    auto cls = classify_overlap(abs_ov);
    run.result["classification"] = {{"phase", phase_name(cls.phase)},
                                    {"k", cls.k},
                                    {"sd", cls.sd},
                                    {"modes", cls.modes}};
  }
}

void cmd_free_energy_ti(Run& run) {
  Spectrum s = spectrum_from_config(run);
  ChainConfig cfg = chain_config_from(run);
  double beta = get_field<double>(run.cfg, "model.beta");
  int grid_points = get_or<int>(run.cfg, "ti.grid_points", 16);
  auto res = free_energy_ti(s, beta, grid_points, cfg);
  auto f = run.open_csv("energy.csv");
  f << "beta,mean_energy,stderr\n";
  for (const auto& pt : res.grid)
    f << g17(pt.beta) << ',' << g17(pt.mean) << ',' << g17(pt.std_error) << '\n';
  run.result["f_over_n"] = res.value;
  run.result["std_error"] = res.std_error;
}

void cmd_overlap_compare(Run& run) {
  std::string mode = get_or<std::string>(run.cfg, "model.mode", "two_spike");
  if (mode != "two_spike")
    throw ConfigError("bad value for field: model.mode (overlap compare needs two_spike)");
  Spectrum s = spectrum_from_config(run);
  double beta = get_field<double>(run.cfg, "model.beta");
  double J = get_field<double>(run.cfg, "model.J");
  double c = get_field<double>(run.cfg, "model.c");
  ChainConfig cfg = chain_config_from(run);
  long pairs = get_or<long>(run.cfg, "overlap.pairs", 10000);
  long mc = get_or<long>(run.cfg, "overlap.mc_samples", 200000);
  double tol = get_or<double>(run.cfg, "overlap.ks_tolerance", 0.08);

  auto smp = sample_overlaps(s, cfg, pairs);
  write_overlaps_csv(run, smp);
  std::vector<double> abs_ov(smp.size());
  for (size_t i = 0; i < smp.size(); ++i) abs_ov[i] = std::abs(smp[i].ov);
  auto law = make_limit_law(beta, J, c);
  LimitAbsCdf ref(law, mc);
  double ks = ks_distance(abs_ov, ref);

  auto f = run.open_csv("compare.csv");
  f << "n,pairs,ks,ks_tolerance\n";
  f << s.n << ',' << pairs << ',' << g17(ks) << ',' << g17(tol) << '\n';
  run.result["n"] = s.n;
  run.result["pairs"] = pairs;
  run.result["ks"] = ks;
  run.result["ks_tolerance"] = tol;
  run.result["pass"] = ks < tol;
  if (ks >= tol) run.warnings.push_back("KS distance above tolerance");
}

void cmd_limit_sample(Run& run) {
  double beta = get_field<double>(run.cfg, "model.beta");
  double J = get_field<double>(run.cfg, "model.J");
  double c = get_field<double>(run.cfg, "model.c");
  long samples = get_or<long>(run.cfg, "limit.samples", 100000);
  auto law = make_limit_law(beta, J, c);
  auto rng = make_stream(run.seed, 1, stream::overlap_limit);
  auto f = run.open_csv("limit_ov.csv");
  f << "ov\n";
  double mean = 0.0, sq = 0.0;
  for (long t = 0; t < samples; ++t) {
    double ov = sample_limit_overlap(law, rng);
    mean += ov;
    sq += ov * ov;
    f << g17(ov) << '\n';
  }
  run.result["samples"] = samples;
  run.result["mean"] = mean / static_cast<double>(samples);
  run.result["second_moment"] = sq / static_cast<double>(samples);
  run.result["r0_hat"] = law.r0_hat;
}

void cmd_limit_density(Run& run) {
  double beta = get_field<double>(run.cfg, "model.beta");
  double J = get_field<double>(run.cfg, "model.J");
  double c = get_field<double>(run.cfg, "model.c");
  int pts = get_or<int>(run.cfg, "limit.density_points", 512);
  auto law = make_limit_law(beta, J, c);
  auto f = run.open_csv("density.csv");
  f << "x,fs_density\n";
  for (int i = 0; i < pts; ++i) {
    double x = law.r0_hat * (i + 0.5) / pts;
    f << g17(x) << ',' << g17(law.s_law.pdf(x)) << '\n';
  }
  run.result["points"] = pts;
  run.result["r0_hat"] = law.r0_hat;
  run.result["a"] = law.a;
}

void cmd_oracle_zn(Run& run) {
  Spectrum s = spectrum_from_config(run);
  double beta = get_field<double>(run.cfg, "model.beta");
  long samples = get_or<long>(run.cfg, "oracle.samples", 2000000);
  auto rng = make_stream(run.seed, 0, stream::oracle_mc);
  auto est = oracle::zn_direct_mc(s, beta, samples, rng);
  auto f = run.open_csv("zn.csv");
  f << "n,beta,log_z_over_n,stderr,high_variance\n";
  f << s.n << ',' << g17(beta) << ',' << g17(est.log_z_over_n) << ','
    << g17(est.std_error) << ',' << (est.high_variance ? 1 : 0) << '\n';
  run.result["log_z_over_n"] = est.log_z_over_n;
  run.result["std_error"] = est.std_error;
  run.result["high_variance"] = est.high_variance;
  if (est.high_variance) {
    run.warnings.push_back("HIGH_VARIANCE: relative error of the Z estimate exceeds 10%");
    if (run.strict) fail(errc::sampler_stall, "HIGH_VARIANCE escalated by --strict");
  }
}

void cmd_oracle_marginal(Run& run) {
  Spectrum s = spectrum_from_config(run);
  double beta = get_field<double>(run.cfg, "model.beta");
  int coord = get_or<int>(run.cfg, "oracle.coord", 2);
  int pts = get_or<int>(run.cfg, "oracle.grid_points", 257);
  auto density = oracle::exact_density_small_n(s, beta, coord);
  auto f = run.open_csv("marginal.csv");
  f << "x,density\n";
  for (int i = 0; i < pts; ++i) {
    double x = (i + 0.5) / pts;
    f << g17(x) << ',' << g17(density(x)) << '\n';
  }
  run.result["coord"] = coord;
  run.result["n"] = s.n;
  run.result["points"] = pts;
}

int dispatch(const std::string& name, Run& run) {
  auto started = std::chrono::steady_clock::now();
  if (name == "spectrum build") cmd_spectrum_build(run);
  else if (name == "variational solve") cmd_variational_solve(run);
  else if (name == "variational gap") cmd_variational_gap(run);
  else if (name == "variational profile") cmd_variational_profile(run);
  else if (name == "mcmc sample") cmd_mcmc_sample(run);
  else if (name == "free-energy ti") cmd_free_energy_ti(run);
  else if (name == "overlap compare") cmd_overlap_compare(run);
  else if (name == "limit sample") cmd_limit_sample(run);
  else if (name == "limit density") cmd_limit_density(run);
  else if (name == "oracle zn") cmd_oracle_zn(run);
  else if (name == "oracle marginal") cmd_oracle_marginal(run);
  else throw ConfigError("unknown subcommand: " + name);
  auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started);

  json manifest;
  manifest["subcommand"] = name;
  manifest["config"] = run.cfg;
  manifest["out_dir"] = run.out_dir.string();
  manifest["strict"] = run.strict;
  manifest["seed"] = run.seed;
  manifest["versions"] = {{"twospike", "0.1.0"}, {"compiler", __VERSION__}};
  manifest["wall_time_seconds"] = elapsed.count();
  manifest["outputs"] = run.outputs;
  manifest["result"] = run.result;
  manifest["warnings"] = run.warnings;
  std::filesystem::create_directories(run.out_dir);
  std::ofstream mf(run.out_dir / "run.json", std::ios::binary);
  mf << manifest.dump(2) << '\n';
  for (const auto& w : run.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << run.result.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-spike spherical model toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  bool strict = false;
  int threads = 0;
  std::vector<std::pair<CLI::App*, std::string>> leaves;
  auto leaf = [&](CLI::App* parent, const std::string& sub, const std::string& full,
                  const std::string& help) {
    CLI::App* l = parent->add_subcommand(sub, help);
    l->add_option("--config", config_path, "JSON experiment config")->required();
    l->add_option("--out", out_dir, "output directory (default: out)");
    l->add_flag("--strict", strict, "escalate numerical warnings to errors");
    l->add_option("--threads", threads, "thread count (0 = library default)");
    leaves.emplace_back(l, full);
  };

  auto* spectrum = app.add_subcommand("spectrum", "spectrum construction");
  spectrum->require_subcommand(1);
  leaf(spectrum, "build", "spectrum build", "build a spectrum, save it, optionally check rigidity");
  auto* variational = app.add_subcommand("variational", "discretized free-energy optimization");
  variational->require_subcommand(1);
  leaf(variational, "solve", "variational solve", "closed-form stationary point and limit gap");
  leaf(variational, "gap", "variational gap", "quadratic concentration-gap scan");
  leaf(variational, "profile", "variational profile", "spike-mass profile of the limit objective");
  auto* mcmc = app.add_subcommand("mcmc", "Gibbs sampling");
  mcmc->require_subcommand(1);
  leaf(mcmc, "sample", "mcmc sample", "paired-replica overlap samples");
  auto* fe = app.add_subcommand("free-energy", "free energy estimation");
  fe->require_subcommand(1);
  leaf(fe, "ti", "free-energy ti", "thermodynamic integration of the mean energy");
  auto* overlap = app.add_subcommand("overlap", "overlap law comparison");
  overlap->require_subcommand(1);
  leaf(overlap, "compare", "overlap compare", "KS distance of sampled |ov| to the limit law");
  auto* limit = app.add_subcommand("limit", "limiting overlap law");
  limit->require_subcommand(1);
  leaf(limit, "sample", "limit sample", "draws from the limiting overlap law");
  leaf(limit, "density", "limit density", "tilted-arcsine factor density on a grid");
  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force references");
  oracle_cmd->require_subcommand(1);
  leaf(oracle_cmd, "zn", "oracle zn", "direct Monte Carlo of log Z / n at small n");
  leaf(oracle_cmd, "marginal", "oracle marginal", "exact 1-D marginal density at small n");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  std::string name;
  for (const auto& [l, full] : leaves)
    if (l->parsed()) name = full;

  try {
    if (threads > 0) {
#ifdef _OPENMP
      omp_set_num_threads(threads);
#endif
    } else if (threads < 0) {
      throw ConfigError("bad value for flag: --threads");
    }
    Run run;
    std::ifstream cf(config_path);
    if (!cf) throw ConfigError("cannot open config file: " + config_path);
    try {
      run.cfg = json::parse(cf);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    run.out_dir = get_or<std::string>(run.cfg, "outputs.directory", out_dir);
    if (out_dir != "out") run.out_dir = out_dir;  // flag wins when given
    run.strict = strict;
    run.seed = get_or<std::uint64_t>(run.cfg, "mcmc.seed", 1);
    return dispatch(name, run);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    bool numerical = e.code() == errc::k_too_small || e.code() == errc::sampler_stall;
    return numerical ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
