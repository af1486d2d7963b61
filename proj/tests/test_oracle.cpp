#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "twospike/errors.hpp"
#include "twospike/gibbs.hpp"
#include "twospike/measures.hpp"
#include "twospike/oracle.hpp"
#include "twospike/quadrature.hpp"
#include "twospike/rng.hpp"
#include "twospike/semicircle.hpp"
#include "twospike/spectrum.hpp"

using namespace twospike;

namespace {

// Same layout as build_two_spike, but without the edge-clearance veto, so the
// degenerate lambda_2 = 2 corner stays reachable for reference runs.
Spectrum hand_two_spike(int n, double J, double c) {
  Spectrum s;
  s.mode = SpectrumMode::two_spike;
  s.n = n;
  s.J = J;
  s.c = c;
  s.lambda.resize(static_cast<size_t>(n));
  s.lambda[0] = J + 1.0 / J;
  s.lambda[1] = s.lambda[0] - c / n;
  for (int i = 3; i <= n; ++i)
    s.lambda[static_cast<size_t>(i) - 1] = sc_quantile((n - i + 0.5) / (n - 2));
  return s;
}

}  // namespace

TEST_CASE("direct partition estimates are exact in degenerate cases") {
  auto g = make_stream(70, 0, stream::oracle_mc);
  auto s = build_two_spike(20, 2.0, 2.0);
  auto free_est = oracle::zn_direct_mc(s, 0.0, 5000, g);
  CHECK(free_est.log_z_over_n == 0.0);
  CHECK(free_est.std_error == 0.0);
  CHECK_FALSE(free_est.high_variance);

  Spectrum flat;
  flat.mode = SpectrumMode::goe;
  flat.n = 2;
  flat.lambda = {1.2, 1.2};
  auto const_est = oracle::zn_direct_mc(flat, 0.7, 2000, g);
  CHECK(const_est.log_z_over_n == doctest::Approx(0.7 * 1.2 / 2.0).epsilon(1e-12));
  CHECK(const_est.std_error < 1e-12);

  auto g1 = make_stream(71, 0, stream::oracle_mc);
  auto g2 = make_stream(71, 0, stream::oracle_mc);
  auto e1 = oracle::zn_direct_mc(s, 0.5, 20000, g1);
  auto e2 = oracle::zn_direct_mc(s, 0.5, 20000, g2);
  CHECK(e1.log_z_over_n == e2.log_z_over_n);
  CHECK(e1.std_error == e2.std_error);

  CHECK_THROWS_AS(oracle::zn_direct_mc(s, -0.1, 100, g), Error);
  CHECK_THROWS_AS(oracle::zn_direct_mc(s, 0.5, 1, g), Error);
}

TEST_CASE("direct estimates agree with thermodynamic integration on small systems") {
  struct Combo {
    double beta, J, c;
  };
  const Combo combos[] = {{0.5, 2.0, 2.0}, {1.0, 2.0, 2.0}, {1.0, 3.0, 0.0}};
  auto g = make_stream(72, 0, stream::oracle_mc);
  for (const auto& cb : combos) {
    for (int n : {4, 8, 12}) {
      CAPTURE(cb.beta);
      CAPTURE(cb.J);
      CAPTURE(cb.c);
      CAPTURE(n);
      Spectrum s = (n == 4 && cb.c == 2.0) ? hand_two_spike(4, cb.J, cb.c)
                                           : build_two_spike(n, cb.J, cb.c);
      auto zn = oracle::zn_direct_mc(s, cb.beta, 2000000, g);
      CHECK_FALSE(zn.high_variance);

      ChainConfig cfg;
      cfg.sweeps = 20000;
      cfg.burnin = 4000;
      cfg.seed = 73;
      auto ti = free_energy_ti(s, cb.beta, 16, cfg);
      // Allow 1e-3 on top of the Monte Carlo bars for the trapezoid bias.
      CHECK(std::abs(ti.value - zn.log_z_over_n) <
            3.0 * (ti.std_error + zn.std_error) + 1e-3);
    }
  }
}

TEST_CASE("stressed direct estimates flag their own variance") {
  auto g = make_stream(74, 0, stream::oracle_mc);
  auto s = build_two_spike(40, 2.0, 2.0);
  auto est = oracle::zn_direct_mc(s, 3.0, 2000, g);
  CHECK(est.high_variance);
}

TEST_CASE("blocked coarse-grained expectation matches independent integration") {
  for (int K : {1, 2, 3})
    CHECK(std::abs(oracle::blocked_expectation_quadrature(K, 20, 0.0, std::vector<double>(static_cast<size_t>(K), 1.0), 2.5)) < 1e-9);

  // One block: the coarse profile is a Beta pair, so a scalar integral
  // settles the same number.
  {
    const int n = 10;
    const double beta = 0.4, spike = 2.4, lam = 0.3, b = (n - 2) / 2.0;
    double expect = integral(
        [&](double x) {
          return b * std::pow(x, b - 1.0) *
                 std::exp(0.5 * n * beta * (spike * (1.0 - x) + lam * x));
        },
        0.0, 1.0, 1e-13, 1e-13);
    double blocked = oracle::blocked_expectation_quadrature(1, n, beta, {lam}, spike);
    CHECK(blocked == doctest::Approx(std::log(expect) / n).epsilon(1e-8));
  }

  // Two blocks at n = 40 against plain Monte Carlo over coarse profiles.
  {
    const int n = 40;
    const double beta = 0.3, spike = 2.5;
    const std::vector<double> lam = {1.0, -0.5};
    auto g = make_stream(75, 0, stream::oracle_mc);
    const long m = 400000;
    std::vector<double> expo(static_cast<size_t>(m));
    for (long t = 0; t < m; ++t) {
      auto eta = sample_uniform_sphere(n, g);
      for (auto& v : eta) v *= v;
      auto r = block_coarsen(eta, 2);
      expo[static_cast<size_t>(t)] =
          0.5 * n * beta * (spike * r[0] + lam[0] * r[1] + lam[1] * r[2]);
    }
    double shift = *std::max_element(expo.begin(), expo.end());
    double sum = 0.0, sumsq = 0.0;
    for (double e : expo) {
      double w = std::exp(e - shift);
      sum += w;
      sumsq += w * w;
    }
    double mean = sum / static_cast<double>(m);
    double rel_se = std::sqrt((sumsq / m - mean * mean) / (m - 1.0)) / mean;
    double mc = (shift + std::log(mean)) / n;
    double blocked = oracle::blocked_expectation_quadrature(2, n, beta, lam, spike);
    CHECK(std::abs(blocked - mc) < 3.0 * rel_se / n + 1e-10);
  }

  double lo = oracle::blocked_expectation_quadrature(3, 41, 0.2, {1.0, 0.0, -1.0}, 2.5);
  double hi = oracle::blocked_expectation_quadrature(3, 41, 0.4, {1.0, 0.0, -1.0}, 2.5);
  CHECK(hi > lo);
  CHECK(lo > 0.0);

  CHECK_THROWS_AS(oracle::blocked_expectation_quadrature(0, 20, 0.3, {}, 2.5), Error);
  CHECK_THROWS_AS(oracle::blocked_expectation_quadrature(4, 20, 0.3, {1, 1, 1, 1}, 2.5), Error);
  CHECK_THROWS_AS(oracle::blocked_expectation_quadrature(2, 20, 0.3, {1.0}, 2.5), Error);
  CHECK_THROWS_AS(oracle::blocked_expectation_quadrature(3, 4, 0.3, {1, 1, 1}, 2.5), Error);
  CHECK_THROWS_AS(oracle::blocked_expectation_quadrature(2, 20, -0.3, {1.0, 0.0}, 2.5), Error);
}

TEST_CASE("blocked upper envelope brackets the true partition function") {
  const double beta = 0.3;
  auto s = build_two_spike(42, 2.0, 2.0);
  auto rig = check_rigidity(s, 2, 2.1);
  auto q = sc_quantiles(2);
  double blocked = oracle::blocked_expectation_quadrature(
      2, s.n, beta, {q.bin_upper(1), q.bin_upper(2)}, s.lambda[0]);

  auto g = make_stream(76, 0, stream::oracle_mc);
  auto zn = oracle::zn_direct_mc(s, beta, 1500000, g);
  CHECK_FALSE(zn.high_variance);

  CHECK(blocked >= zn.log_z_over_n - 3.0 * zn.std_error);
  double slack = 0.5 * beta * (rig.worst + s.c / s.n);
  CHECK(blocked <= zn.log_z_over_n + slack + 3.0 * zn.std_error);
}

TEST_CASE("exact small-system densities reduce to closed forms") {
  const double grid[] = {0.04, 0.2, 0.5, 0.81, 0.96};

  Spectrum s3;
  s3.mode = SpectrumMode::goe;
  s3.n = 3;
  s3.lambda = {0.9, 0.4, -0.2};
  auto f3 = oracle::exact_density_small_n(s3, 0.0, 1);
  for (double x : grid)
    CHECK(f3(x) == doctest::Approx(0.5 / std::sqrt(x)).epsilon(1e-6));
  CHECK(f3(0.0) == 0.0);
  CHECK(f3(1.0) == 0.0);
  CHECK(f3(-0.5) == 0.0);

  Spectrum s4;
  s4.mode = SpectrumMode::goe;
  s4.n = 4;
  s4.lambda = {0.7, 0.7, 0.7, 0.7};
  auto f4 = oracle::exact_density_small_n(s4, 2.0, 2);
  for (double x : grid)
    CHECK(f4(x) ==
          doctest::Approx(std::sqrt((1.0 - x) / x) * 2.0 / std::numbers::pi).epsilon(1e-6));

  auto s5 = build_one_spike(5, 2.0);
  auto f5 = oracle::exact_density_small_n(s5, 0.8, 1);
  const int m = 4000;
  double mass = 0.0;
  for (int k = 0; k < m; ++k) {
    double u = (k + 0.5) / m;
    mass += f5(u * u) * 2.0 * u / m;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-5));
  auto f5_free = oracle::exact_density_small_n(s5, 0.0, 1);
  CHECK(f5(0.8) > f5_free(0.8));

  Spectrum s3e;
  s3e.mode = SpectrumMode::goe;
  s3e.n = 3;
  s3e.lambda = {1.5, 0.3, 0.3};
  auto fa = oracle::exact_density_small_n(s3e, 1.2, 2);
  auto fb = oracle::exact_density_small_n(s3e, 1.2, 3);
  for (double x : grid) CHECK(fa(x) == doctest::Approx(fb(x)).epsilon(1e-9));

  CHECK_THROWS_AS(oracle::exact_density_small_n(build_one_spike(7, 2.0), 1.0, 1), Error);
  CHECK_THROWS_AS(oracle::exact_density_small_n(s5, 1.0, 0), Error);
  CHECK_THROWS_AS(oracle::exact_density_small_n(s5, 1.0, 6), Error);
  CHECK_THROWS_AS(oracle::exact_density_small_n(s5, -1.0, 1), Error);
}

TEST_CASE("bessel i0 reference") {
  CHECK(oracle::bessel_i0(0.0) == 1.0);
  CHECK(oracle::bessel_i0(1.0) == doctest::Approx(1.2660658777520084).epsilon(1e-12));
  CHECK(oracle::bessel_i0(-3.0) == oracle::bessel_i0(3.0));

  // Both expansion branches against the integral form, tight on the seam.
  for (double x : {0.5, 5.0, 19.999, 20.001, 50.0, 200.0}) {
    CAPTURE(x);
    double ref = integral([x](double th) { return std::exp(x * (std::cos(th) - 1.0)); },
                          0.0, std::numbers::pi, 1e-15, 1e-14) /
                 std::numbers::pi;
    CHECK(oracle::bessel_i0(x) * std::exp(-x) == doctest::Approx(ref).epsilon(1e-10));
  }
  CHECK(oracle::bessel_i0(20.0 - 1e-9) < oracle::bessel_i0(20.0 + 1e-9));
}
