#include "twospike/semicircle.hpp"

#include <cmath>
#include <numbers>

#include "twospike/errors.hpp"
#include "twospike/quadrature.hpp"

namespace twospike {

double sc_density(double x) {
  if (x <= -2.0 || x >= 2.0) return 0.0;
  return std::sqrt(4.0 - x * x) / (2.0 * std::numbers::pi);
}

// After x = -2 cos(theta) the mass below x becomes an integral of the smooth
// function (2/pi) sin^2(theta) over [0, arccos(-x/2)].
double sc_cdf(double x) {
  if (x <= -2.0) return 0.0;
  if (x >= 2.0) return 1.0;
  double theta = std::acos(-0.5 * x);
  auto f = [](double t) {
    double s = std::sin(t);
    return (2.0 / std::numbers::pi) * s * s;
  };
  return integrate(f, 0.0, theta, 1e-13, 1e-13).value;
}

double sc_quantile(double p) {
  require(p >= 0.0 && p <= 1.0, errc::domain, "quantile level outside [0, 1]");
  if (p == 0.0) return -2.0;
  if (p == 1.0) return 2.0;
  double lo = -2.0, hi = 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double c = sc_cdf(mid);
    if (std::abs(c - p) < 1e-13) return mid;
    (c < p ? lo : hi) = mid;
    if (hi - lo < 1e-14) break;
  }
  return 0.5 * (lo + hi);
}

double stieltjes_sc(double z) {
  require(z > 2.0, errc::domain, "transform evaluated at z <= 2");
  return 0.5 * (-z + std::sqrt(z * z - 4.0));
}

double SemicircleQuantiles::max_width() const {
  double w = 0.0;
  for (int i = 1; i <= K; ++i) w = std::max(w, bin_upper(i) - bin_lower(i));
  return w;
}

SemicircleQuantiles sc_quantiles(int K) {
  require(K >= 1, errc::domain, "bin count must be positive");
  SemicircleQuantiles q;
  q.K = K;
  q.edges.resize(static_cast<size_t>(K) + 1);
  q.edges[0] = 2.0;
  q.edges[static_cast<size_t>(K)] = -2.0;
  for (int i = 1; i < K; ++i)
    q.edges[static_cast<size_t>(i)] = sc_quantile(1.0 - static_cast<double>(i) / K);
  return q;
}

}  // namespace twospike
