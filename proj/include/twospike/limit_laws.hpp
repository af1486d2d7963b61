#pragma once

#include <functional>
#include <random>
#include <vector>

#include "twospike/measures.hpp"

namespace twospike {

// Limit law of the overlap between two independent replicas:
//   Ov = z1 sqrt(s1 s2) + z2 sqrt((r0 - s1)(r0 - s2)),
// with s1, s2 independent tilted-arcsine draws on (0, r0), z1, z2 fair signs.
struct OverlapLimitLaw {
  double beta = 0.0;
  double J = 0.0;
  double c = 0.0;
  double r0_hat = 0.0;  // 1 - 1/(beta J)
  double a = 0.0;       // c beta / 2
  TiltedArcsine s_law;
};

OverlapLimitLaw make_limit_law(double beta, double J, double c);

double sample_limit_overlap(const OverlapLimitLaw& law, std::mt19937_64& rng);

// Empirical CDF of |Ov| from a Monte Carlo table drawn with a fixed internal
// seed, so repeated constructions agree bit for bit.
class LimitAbsCdf {
 public:
  LimitAbsCdf(const OverlapLimitLaw& law, long samples);
  double operator()(double x) const;
  double dkw_halfwidth() const;  // 99.9% uniform band
  const std::vector<double>& sorted() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

// One-shot Monte Carlo CDF of |Ov| at x; same fixed internal seed as
// LimitAbsCdf, so values agree with the table form.
double limit_cdf_abs(const OverlapLimitLaw& law, double x, long mc_samples);

// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::vector<double> a, std::vector<double> b);

// One-sample distance of an empirical sample (>= 100 points) against a
// reference CDF.
double ks_distance(std::vector<double> sample,
                   const std::function<double(double)>& ref_cdf);
double ks_distance(std::vector<double> sample, const LimitAbsCdf& ref);

}  // namespace twospike
