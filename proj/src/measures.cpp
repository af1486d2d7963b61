#include "twospike/measures.hpp"

#include <cmath>
#include <numbers>

#include "twospike/errors.hpp"
#include "twospike/quadrature.hpp"
#include "twospike/rng.hpp"

namespace twospike {

double sample_gamma(double shape, double scale, std::mt19937_64& rng) {
  require(shape > 0.0, errc::domain, "gamma shape must be positive");
  require(scale > 0.0, errc::domain, "gamma scale must be positive");
  std::gamma_distribution<double> g(shape, scale);
  return g(rng);
}

std::vector<double> sample_dirichlet(const std::vector<double>& alpha,
                                     std::mt19937_64& rng) {
  require(!alpha.empty(), errc::domain, "need at least one weight");
  for (double a : alpha)
    require(a > 0.0, errc::domain, "weights must be positive");
  if (alpha.size() == 1) return {1.0};
  std::vector<double> x(alpha.size());
  for (int attempt = 0; attempt < 100; ++attempt) {
    double sum = 0.0;
    for (size_t i = 0; i < alpha.size(); ++i) {
      x[i] = sample_gamma(alpha[i], 1.0, rng);
      sum += x[i];
    }
    if (sum > 0.0) {
      for (double& v : x) v /= sum;
      return x;
    }
  }
  fail(errc::sampler_stall, "gamma draws underflowed to zero repeatedly");
}

double dirichlet_log_pdf(const std::vector<double>& alpha,
                         const std::vector<double>& x) {
  require(alpha.size() >= 2, errc::domain, "need at least two weights");
  require(alpha.size() == x.size(), errc::dimension_mismatch,
          "weight and point dimensions differ");
  double sum = 0.0, asum = 0.0, lp = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0, errc::domain, "point must be interior to the simplex");
    sum += x[i];
    asum += alpha[i];
    lp += (alpha[i] - 1.0) * std::log(x[i]) - std::lgamma(alpha[i]);
  }
  require(std::abs(sum - 1.0) < 1e-9, errc::domain, "coordinates must sum to 1");
  return lp + std::lgamma(asum);
}

std::vector<double> sample_uniform_sphere(int n, std::mt19937_64& rng) {
  require(n >= 2, errc::domain, "need n >= 2");
  std::vector<double> x(static_cast<size_t>(n));
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    double ss = 0.0;
    for (auto& v : x) {
      v = gauss(rng);
      ss += v * v;
    }
    if (ss > 0.0) {
      double inv = 1.0 / std::sqrt(ss);
      for (auto& v : x) v *= inv;
      return x;
    }
  }
  fail(errc::sampler_stall, "gaussian draws vanished repeatedly");
}

std::vector<double> block_coarsen(const std::vector<double>& eta_sq, int K) {
  const int n = static_cast<int>(eta_sq.size());
  require(n >= 3, errc::domain, "need at least three coordinates");
  require(K >= 1, errc::domain, "need K >= 1");
  require((n - 2) % K == 0, errc::block_mismatch,
          "K = " + std::to_string(K) + " does not divide n - 2 = " +
              std::to_string(n - 2));
  std::vector<double> r(static_cast<size_t>(K) + 1, 0.0);
  r[0] = eta_sq[0] + eta_sq[1];
  const int block = (n - 2) / K;
  for (int i = 0; i < K; ++i) {
    double s = 0.0;
    for (int j = 0; j < block; ++j) s += eta_sq[static_cast<size_t>(2 + i * block + j)];
    r[static_cast<size_t>(i) + 1] = s;
  }
  return r;
}

namespace {

// x = r sin^2(theta) turns the endpoint singularities into a smooth
// integrand 2 exp(-a r sin^2 theta) on [0, pi/2].
double arcsine_theta_integral(double r, double a, double theta_hi) {
  auto f = [r, a](double t) {
    double s = std::sin(t);
    return 2.0 * std::exp(-a * r * s * s);
  };
  return integrate(f, 0.0, theta_hi, 1e-13, 1e-13).value;
}

}  // namespace

TiltedArcsine make_tilted_arcsine(double r, double a) {
  require(r > 0.0, errc::domain, "support length must be positive");
  require(a >= 0.0, errc::domain, "tilt must be nonnegative");
  TiltedArcsine d;
  d.r = r;
  d.a = a;
  d.log_norm = std::log(arcsine_theta_integral(r, a, 0.5 * std::numbers::pi));
  return d;
}

double TiltedArcsine::pdf(double x) const {
  if (x <= 0.0 || x >= r) return 0.0;
  return std::exp(-a * x - log_norm) / std::sqrt(x * (r - x));
}

double TiltedArcsine::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= r) return 1.0;
  double theta = std::asin(std::sqrt(x / r));
  return arcsine_theta_integral(r, a, theta) * std::exp(-log_norm);
}

double TiltedArcsine::mean() const {
  auto f = [this](double t) {
    double s2 = std::sin(t);
    s2 *= s2;
    return 2.0 * r * s2 * std::exp(-a * r * s2);
  };
  return integrate(f, 0.0, 0.5 * std::numbers::pi, 1e-13, 1e-13).value *
         std::exp(-log_norm);
}

double sample_tilted_arcsine(const TiltedArcsine& d, std::mt19937_64& rng) {
  constexpr int kMaxAttempts = 200000;
  const double ar = d.a * d.r;

  if (ar <= 50.0) {
    // Rejection from the untilted arcsine; acceptance exp(-a x) <= 1.
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      double theta = 0.5 * std::numbers::pi * uniform01(rng);
      double s = std::sin(theta);
      double x = d.r * s * s;
      if (uniform01(rng) < std::exp(-d.a * x)) return x;
    }
    fail(errc::sampler_stall, "arcsine rejection exceeded its retry budget");
  }

  // Strong tilt: two-piece dominating envelope.
  //   (0, r/2]:  sqrt(2/r) x^{-1/2} e^{-a x}   (gamma(1/2, 1/a) shape)
  //   (r/2, r):  sqrt(2/r) e^{-a r/2} (r - x)^{-1/2}
  // The low piece keeps its untruncated mass; draws past r/2 restart the
  // whole loop, which keeps the piece proportions exact.
  const double mass_lo = std::sqrt(2.0 / d.r) * std::sqrt(std::numbers::pi / d.a);
  const double mass_hi = 2.0 * std::exp(-0.5 * ar);
  const double p_lo = mass_lo / (mass_lo + mass_hi);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    if (uniform01(rng) < p_lo) {
      double z = gauss(rng);
      double x = 0.5 * z * z / d.a;
      if (x > 0.5 * d.r || x <= 0.0) continue;
      if (uniform01(rng) < std::sqrt(0.5 * d.r / (d.r - x))) return x;
    } else {
      double v = uniform01(rng);
      double x = d.r - 0.5 * d.r * v * v;
      if (x <= 0.5 * d.r || x >= d.r) continue;
      double accept = std::sqrt(0.5 * d.r / x) * std::exp(-d.a * (x - 0.5 * d.r));
      if (uniform01(rng) < accept) return x;
    }
  }
  fail(errc::sampler_stall, "envelope rejection exceeded its retry budget");
}

}  // namespace twospike
