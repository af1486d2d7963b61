#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "twospike/errors.hpp"
#include "twospike/limit_laws.hpp"
#include "twospike/measures.hpp"
#include "twospike/oracle.hpp"
#include "twospike/quadrature.hpp"
#include "twospike/rng.hpp"

using namespace twospike;

namespace {

// 99.9% chi-square cutoff, 49 degrees of freedom.
constexpr double kChi49 = 85.43;

double chi_square_50(const std::vector<double>& pit) {
  std::vector<long> counts(50, 0);
  for (double u : pit) {
    int b = std::min(49, std::max(0, static_cast<int>(u * 50.0)));
    ++counts[static_cast<size_t>(b)];
  }
  double expect = static_cast<double>(pit.size()) / 50.0;
  double chi = 0.0;
  for (long cnt : counts) chi += (cnt - expect) * (cnt - expect) / expect;
  return chi;
}

}  // namespace

TEST_CASE("gamma draws have the right moments") {
  auto g = make_stream(31, 0, stream::generic);
  const int m = 200000;
  double mean = 0.0, sq = 0.0;
  for (int t = 0; t < m; ++t) {
    double x = sample_gamma(3.0, 2.0, g);
    mean += x;
    sq += x * x;
  }
  mean /= m;
  double var = sq / m - mean * mean;
  CHECK(mean == doctest::Approx(6.0).epsilon(0.02));   // shape * scale
  CHECK(var == doctest::Approx(12.0).epsilon(0.05));   // shape * scale^2
  CHECK_THROWS_AS(sample_gamma(0.0, 1.0, g), Error);
  CHECK_THROWS_AS(sample_gamma(1.0, 0.0, g), Error);
}

TEST_CASE("dirichlet draws live on the simplex with exact moments") {
  auto g = make_stream(32, 0, stream::generic);
  CHECK(sample_dirichlet({4.2}, g) == std::vector<double>{1.0});

  std::vector<double> alpha(4, 0.5);
  const int m = 100000;
  std::vector<double> mean(4, 0.0), sq(4, 0.0);
  for (int t = 0; t < m; ++t) {
    auto x = sample_dirichlet(alpha, g);
    double sum = 0.0;
    for (size_t i = 0; i < 4; ++i) {
      mean[i] += x[i];
      sq[i] += x[i] * x[i];
      sum += x[i];
    }
    REQUIRE(std::abs(sum - 1.0) < 1e-12);
  }
  // alpha_0 = 2: E = 1/4, Var = 0.5 * 1.5 / (4 * 3)
  for (size_t i = 0; i < 4; ++i) {
    mean[i] /= m;
    double var = sq[i] / m - mean[i] * mean[i];
    CHECK(mean[i] == doctest::Approx(0.25).epsilon(0.02));
    CHECK(var == doctest::Approx(0.0625).epsilon(0.05));
  }
  CHECK_THROWS_AS(sample_dirichlet({}, g), Error);
  CHECK_THROWS_AS(sample_dirichlet({1.0, -1.0}, g), Error);
}

TEST_CASE("dirichlet log density at hand-computed points") {
  CHECK(dirichlet_log_pdf({1.0, 1.0}, {0.3, 0.7}) == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(dirichlet_log_pdf({0.5, 0.5}, {0.5, 0.5}) ==
        doctest::Approx(std::log(2.0 / std::numbers::pi)).epsilon(1e-13));
  CHECK(dirichlet_log_pdf({1.0, 1.0, 1.0}, {0.2, 0.3, 0.5}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-13));
  CHECK(dirichlet_log_pdf({2.0, 1.0}, {2.0 / 3.0, 1.0 / 3.0}) ==
        doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-13));
  CHECK_THROWS_AS(dirichlet_log_pdf({1.0, 1.0}, {0.4, 0.7}), Error);
  CHECK_THROWS_AS(dirichlet_log_pdf({1.0, 1.0}, {1.0, 0.0}), Error);
  CHECK_THROWS_AS(dirichlet_log_pdf({1.0, 1.0, 1.0}, {0.5, 0.5}), Error);
}

TEST_CASE("uniform sphere has exact norm and known moments") {
  auto g = make_stream(33, 0, stream::generic);
  CHECK_THROWS_AS(sample_uniform_sphere(1, g), Error);

  const int n = 10, m = 100000;
  double m2 = 0.0, m4 = 0.0;
  for (int t = 0; t < m; ++t) {
    auto x = sample_uniform_sphere(n, g);
    double ss = 0.0;
    for (double v : x) {
      ss += v * v;
      m4 += v * v * v * v;
    }
    REQUIRE(std::abs(ss - 1.0) < 1e-12);
    m2 += ss;
  }
  m2 /= static_cast<double>(m) * n;
  m4 /= static_cast<double>(m) * n;
  CHECK(m2 == doctest::Approx(1.0 / n).epsilon(1e-9));
  CHECK(m4 == doctest::Approx(3.0 / (n * (n + 2.0))).epsilon(0.02));

  // Signs are symmetric.
  double smean = 0.0;
  for (int t = 0; t < 20000; ++t) smean += sample_uniform_sphere(3, g)[0];
  CHECK(std::abs(smean / 20000.0) < 0.02);
}

TEST_CASE("block coarsening folds squared coordinates exactly") {
  std::vector<double> sq{0.1, 0.2, 0.3, 0.4};
  auto r2 = block_coarsen(sq, 2);
  REQUIRE(r2.size() == 3);
  CHECK(r2[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(r2[1] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(r2[2] == doctest::Approx(0.4).epsilon(1e-15));
  auto r1 = block_coarsen(sq, 1);
  REQUIRE(r1.size() == 2);
  CHECK(r1[1] == doctest::Approx(0.7).epsilon(1e-15));
  CHECK_THROWS_AS(block_coarsen({0.5, 0.25, 0.15, 0.05, 0.05}, 2), Error);
  CHECK_THROWS_AS(block_coarsen({1.0, 0.0}, 1), Error);
}

TEST_CASE("coarsened sphere matches its dirichlet law") {
  // (r_0, r_1, ..., r_K) from a uniform sphere is Dirichlet with weights
  // (1, b, ..., b), b = (n - 2) / (2K).
  const int n = 102, K = 10, m = 20000;
  const double b = (n - 2.0) / (2.0 * K);
  const double a0 = 1.0 + K * b;  // = n / 2
  auto g = make_stream(34, 0, stream::generic);
  double mean0 = 0.0, sq0 = 0.0, mean1 = 0.0, sq1 = 0.0;
  std::vector<double> sq(n);
  for (int t = 0; t < m; ++t) {
    auto x = sample_uniform_sphere(n, g);
    for (int i = 0; i < n; ++i) sq[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
    auto r = block_coarsen(sq, K);
    mean0 += r[0];
    sq0 += r[0] * r[0];
    mean1 += r[1];
    sq1 += r[1] * r[1];
  }
  mean0 /= m;
  mean1 /= m;
  double var0 = sq0 / m - mean0 * mean0;
  double var1 = sq1 / m - mean1 * mean1;
  double evar0 = 1.0 * (a0 - 1.0) / (a0 * a0 * (a0 + 1.0));
  double evar1 = b * (a0 - b) / (a0 * a0 * (a0 + 1.0));
  CHECK(mean0 == doctest::Approx(1.0 / a0).epsilon(0.05));
  CHECK(mean1 == doctest::Approx(b / a0).epsilon(0.05));
  CHECK(var0 == doctest::Approx(evar0).epsilon(0.05));
  CHECK(var1 == doctest::Approx(evar1).epsilon(0.05));
}

TEST_CASE("tilted arcsine normalization and closed forms") {
  auto flat = make_tilted_arcsine(0.5, 0.0);
  CHECK(std::exp(flat.log_norm) == doctest::Approx(std::numbers::pi).epsilon(1e-13));
  CHECK(flat.mean() == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(flat.cdf(0.25) == doctest::Approx(0.5).epsilon(1e-12));
  for (int i = 1; i < 20; ++i) {
    double x = 0.5 * i / 20.0;
    double closed = 2.0 / std::numbers::pi * std::asin(std::sqrt(x / 0.5));
    CHECK(flat.cdf(x) == doctest::Approx(closed).epsilon(1e-10));
  }

  auto tilted = make_tilted_arcsine(0.5, 1.0);
  CHECK(std::exp(tilted.log_norm) == doctest::Approx(2.485053705441589).epsilon(1e-12));
  auto total = integrate([&](double t) {
    double s = std::sin(t);
    double x = 0.5 * s * s;
    return tilted.pdf(x) * std::sin(2.0 * t) * 0.5;
  }, 1e-9, std::numbers::pi / 2.0 - 1e-9);
  CHECK(total.value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(tilted.mean() < flat.mean());  // tilt pushes mass left

  // Tilted normalizer equals pi e^{-ar/2} I_0(ar/2) across regimes.
  for (auto [r, a] : std::vector<std::pair<double, double>>{
           {0.5, 1.0}, {0.5, 20.0}, {1.0, 50.0}, {0.5, 200.0}}) {
    auto d = make_tilted_arcsine(r, a);
    double besseled = std::numbers::pi * std::exp(-0.5 * a * r) *
                      oracle::bessel_i0(0.5 * a * r);
    CHECK(std::exp(d.log_norm) == doctest::Approx(besseled).epsilon(1e-8));
  }

  CHECK_THROWS_AS(make_tilted_arcsine(0.0, 1.0), Error);
  CHECK_THROWS_AS(make_tilted_arcsine(1.0, -0.1), Error);
}

TEST_CASE("tilted arcsine sampler passes goodness of fit across tilt regimes") {
  // Probability transform to uniform bins; 50-bin chi-square at the 1e-3
  // level. Covers the plain-rejection and two-piece-envelope paths.
  const int m = 100000;
  int which = 0;
  for (auto [r, a] : std::vector<std::pair<double, double>>{
           {0.5, 0.0}, {0.5, 2.0}, {1.0, 10.0}, {0.5, 200.0}}) {
    auto d = make_tilted_arcsine(r, a);
    auto g = make_stream(35, static_cast<std::uint64_t>(which++), stream::generic);
    std::vector<double> pit(m);
    for (int t = 0; t < m; ++t) {
      double x = sample_tilted_arcsine(d, g);
      REQUIRE(x > 0.0);
      REQUIRE(x < r);
      pit[static_cast<size_t>(t)] = d.cdf(x);
    }
    CHECK(chi_square_50(pit) < kChi49);
  }
}

TEST_CASE("untilted sampler agrees with the arcsine law") {
  auto d = make_tilted_arcsine(1.0, 0.0);
  auto g = make_stream(36, 0, stream::generic);
  std::vector<double> draws(20000);
  for (auto& v : draws) v = sample_tilted_arcsine(d, g);
  double ks = ks_distance(draws, [](double x) {
    return 2.0 / std::numbers::pi * std::asin(std::sqrt(std::clamp(x, 0.0, 1.0)));
  });
  CHECK(ks < 0.015);
}

TEST_CASE("tilted arcsine sampling is reproducible by stream") {
  auto d = make_tilted_arcsine(0.5, 3.0);
  auto g1 = make_stream(37, 4, stream::generic);
  auto g2 = make_stream(37, 4, stream::generic);
  for (int t = 0; t < 100; ++t)
    CHECK(sample_tilted_arcsine(d, g1) == sample_tilted_arcsine(d, g2));
}
