#include "twospike/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "twospike/errors.hpp"
#include "twospike/measures.hpp"

namespace twospike {
namespace oracle {

namespace {

// Plain recursive Simpson, local to this translation unit on purpose.
double simpson_step(const std::function<double(double)>& f, double a, double b,
                    double fa, double fm, double fb, double whole, double tol,
                    int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol) {
  if (a == b) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace

ZnEstimate zn_direct_mc(const Spectrum& s, double beta, long samples,
                        std::mt19937_64& rng) {
  require(beta >= 0.0, errc::domain, "need beta >= 0");
  require(samples >= 2, errc::domain, "need at least two samples");
  const int n = s.n;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> expo(static_cast<size_t>(samples));
  std::vector<double> g(static_cast<size_t>(n));
  for (long k = 0; k < samples; ++k) {
    double ss = 0.0;
    for (auto& v : g) {
      v = gauss(rng);
      ss += v * v;
    }
    double h = 0.0;  // H / n of the normalized point
    for (int i = 0; i < n; ++i) h += s.lambda[static_cast<size_t>(i)] * g[static_cast<size_t>(i)] * g[static_cast<size_t>(i)];
    h = 0.5 * h / ss;
    expo[static_cast<size_t>(k)] = beta * n * h;
  }
  double shift = *std::max_element(expo.begin(), expo.end());
  for (auto& e : expo) e = std::exp(e - shift);
  const double m = static_cast<double>(samples);
  double sum = 0.0;
  for (double w : expo) sum += w;
  double mean = sum / m;
  double var = 0.0;
  for (double w : expo) var += (w - mean) * (w - mean);
  var /= m - 1.0;
  double rel = std::sqrt(var / m) / mean;
  ZnEstimate est;
  est.log_z_over_n = (shift + std::log(mean)) / n;
  est.std_error = rel / n;
  est.high_variance = rel > 0.1;
  return est;
}

namespace {

struct BlockedIntegrand {
  int K;
  double half_nbeta;  // n beta / 2
  double b;           // Dirichlet weight of each bulk block
  const std::vector<double>* lambda;
  double spike;

  // log of the integral over blocks level+1..K given remaining mass.
  double level_log(int level, double mass) const {
    if (mass <= 1e-300) return level == K ? 0.0 : -std::numeric_limits<double>::infinity();
    if (level == K) return half_nbeta * spike * mass;
    const double lam = (*lambda)[static_cast<size_t>(level)];
    // r_{level+1} = mass t^2 keeps the endpoint smooth for any weight >= 1/2.
    auto log_f = [&](double t) {
      double r = mass * t * t;
      double rest = level_log(level + 1, mass * (1.0 - t * t));
      double power = t > 0.0 ? (2.0 * b - 1.0) * std::log(t) : (2.0 * b == 1.0 ? 0.0 : -std::numeric_limits<double>::infinity());
      return power + half_nbeta * lam * r + rest;
    };
    // Shift by the max over a probe grid, then integrate the exponential.
    double peak = -std::numeric_limits<double>::infinity();
    constexpr int kProbe = 65;
    for (int q = 0; q <= kProbe; ++q) {
      double t = (q + 0.5) / (kProbe + 1.0);
      peak = std::max(peak, log_f(t));
    }
    if (!std::isfinite(peak)) return -std::numeric_limits<double>::infinity();
    auto f = [&](double t) {
      double v = log_f(t);
      return std::isfinite(v) ? std::exp(v - peak) : 0.0;
    };
    double integral = adaptive_simpson(f, 0.0, 1.0, 1e-10);
    return std::log(2.0 * std::pow(mass, b)) + peak + std::log(std::max(integral, 1e-300));
  }
};

}  // namespace

double blocked_expectation_quadrature(int K, int n, double beta,
                                      const std::vector<double>& lambda_bulk,
                                      double spike) {
  require(K >= 1 && K <= 3, errc::domain, "K must be 1, 2, or 3");
  require(n >= 4, errc::domain, "need n >= 4");
  require(n - 2 >= K, errc::domain, "need n - 2 >= K");
  require(beta >= 0.0, errc::domain, "need beta >= 0");
  require(static_cast<int>(lambda_bulk.size()) == K, errc::dimension_mismatch,
          "need one bulk level per block");
  const double b = (n - 2) / (2.0 * K);
  BlockedIntegrand bi{K, 0.5 * n * beta, b, &lambda_bulk, spike};
  double log_e = std::lgamma(1.0 + K * b) - K * std::lgamma(b) + bi.level_log(0, 1.0);
  return log_e / n;
}

namespace {

// Tabulated function of v in [0, 1] with cubic interpolation.
struct Table {
  std::vector<double> y;
  double operator()(double v) const {
    const int n = static_cast<int>(y.size());
    double pos = v * (n - 1);
    int i = std::clamp(static_cast<int>(pos), 1, n - 3);
    double t = pos - i;
    double ym = y[static_cast<size_t>(i) - 1], y0 = y[static_cast<size_t>(i)],
           y1 = y[static_cast<size_t>(i) + 1], y2 = y[static_cast<size_t>(i) + 2];
    return y0 + 0.5 * t * (y1 - ym + t * (2.0 * ym - 5.0 * y0 + 4.0 * y1 - y2 +
                                          t * (3.0 * (y0 - y1) + y2 - ym)));
  }
};

constexpr int kTablePoints = 1025;

}  // namespace

std::function<double(double)> exact_density_small_n(const Spectrum& s, double beta,
                                                    int coord) {
  require(s.n >= 3 && s.n <= 6, errc::domain, "supported for 3 <= n <= 6 only");
  require(coord >= 1 && coord <= s.n, errc::domain, "coordinate out of range");
  require(beta >= 0.0, errc::domain, "need beta >= 0");
  const double alpha = 0.5 * s.n * beta;
  const double mu_c = s.lambda[static_cast<size_t>(coord) - 1];
  std::vector<double> rest;
  for (int i = 0; i < s.n; ++i)
    if (i != coord - 1) rest.push_back(s.lambda[static_cast<size_t>(i)]);

  // Integrate the remaining coordinates last-two-first. Tables hold the
  // partial integrals as functions of v = sqrt(remaining mass), which keeps
  // every integrand smooth after trigonometric substitution.
  auto table = std::make_shared<Table>();
  table->y.resize(kTablePoints);
  {
    const double a0 = rest[rest.size() - 2], a1 = rest[rest.size() - 1];
    for (int k = 0; k < kTablePoints; ++k) {
      double v = static_cast<double>(k) / (kTablePoints - 1);
      double mass = v * v;
      auto f = [&](double th) {
        double s2 = std::sin(th);
        s2 *= s2;
        return std::exp(alpha * mass * (a0 * s2 + a1 * (1.0 - s2)));
      };
      table->y[static_cast<size_t>(k)] = 2.0 * adaptive_simpson(f, 0.0, 0.5 * std::numbers::pi, 1e-12);
    }
  }
  for (int level = static_cast<int>(rest.size()) - 3; level >= 0; --level) {
    auto prev = table;
    auto next = std::make_shared<Table>();
    next->y.resize(kTablePoints);
    const double mu = rest[static_cast<size_t>(level)];
    for (int k = 0; k < kTablePoints; ++k) {
      double v = static_cast<double>(k) / (kTablePoints - 1);
      // coordinate = v^2 sin^2(psi), leftover mass = (v cos(psi))^2
      auto f = [&](double psi) {
        double sn = std::sin(psi), cn = std::cos(psi);
        return std::exp(alpha * mu * v * v * sn * sn) * (*prev)(v * cn) * v * cn;
      };
      next->y[static_cast<size_t>(k)] = 2.0 * adaptive_simpson(f, 0.0, 0.5 * std::numbers::pi, 1e-12);
    }
    table = next;
  }

  auto unnorm = [table, alpha, mu_c](double x) {
    return std::exp(alpha * mu_c * x) * (*table)(std::sqrt(1.0 - x));
  };
  auto nf = [&](double phi) {
    double sn = std::sin(phi), cn = std::cos(phi);
    return std::exp(alpha * mu_c * sn * sn) * (*table)(cn) * cn;
  };
  const double norm = 2.0 * adaptive_simpson(nf, 0.0, 0.5 * std::numbers::pi, 1e-12);

  return [unnorm, norm](double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return unnorm(x) / (std::sqrt(x) * norm);
  };
}

double bessel_i0(double x) {
  x = std::abs(x);
  if (x <= 20.0) {
    double term = 1.0, sum = 1.0;
    double q = 0.25 * x * x;
    for (int k = 1; k < 80; ++k) {
      term *= q / (static_cast<double>(k) * k);
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return sum;
  }
  // Sum to the smallest term; past it the asymptotic tail diverges.
  double c = 1.0, sum = 1.0, prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 40; ++k) {
    c *= (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
    if (c >= prev) break;
    sum += c;
    prev = c;
    if (c < 1e-17 * sum) break;
  }
  return std::exp(x) / std::sqrt(2.0 * std::numbers::pi * x) * sum;
}

}  // namespace oracle
}  // namespace twospike
