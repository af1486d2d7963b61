#pragma once

#include <random>
#include <vector>

namespace twospike {

double sample_gamma(double shape, double scale, std::mt19937_64& rng);

std::vector<double> sample_dirichlet(const std::vector<double>& alpha,
                                     std::mt19937_64& rng);

// Log density with respect to Lebesgue measure on the first k-1 coordinates.
double dirichlet_log_pdf(const std::vector<double>& alpha,
                         const std::vector<double>& x);

// Signed coordinates of a uniform point on the unit sphere in R^n.
std::vector<double> sample_uniform_sphere(int n, std::mt19937_64& rng);

// (r_0, r_1, ..., r_K): r_0 sums the first two squared coordinates, the bulk
// is folded into K equal blocks. Requires K | n - 2.
std::vector<double> block_coarsen(const std::vector<double>& eta_sq, int K);

// Density on (0, r) proportional to exp(-a x) / sqrt(x (r - x)).
struct TiltedArcsine {
  double r = 0.0;
  double a = 0.0;
  double log_norm = 0.0;  // log of the normalizing integral

  double pdf(double x) const;
  double cdf(double x) const;
  double mean() const;
};

TiltedArcsine make_tilted_arcsine(double r, double a);
double sample_tilted_arcsine(const TiltedArcsine& d, std::mt19937_64& rng);

}  // namespace twospike
