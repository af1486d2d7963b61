#pragma once

#include <functional>
#include <random>
#include <vector>

#include "twospike/spectrum.hpp"

namespace twospike {
namespace oracle {

// Reference implementations kept deliberately separate from the production
// code paths: they share no integrator or special-function code with the
// rest of the library.

struct ZnEstimate {
  double log_z_over_n = 0.0;
  double std_error = 0.0;    // delta-method error of log Z / n
  bool high_variance = false;  // relative error of the plain mean > 10%
};

// log Z / n by direct uniform-sphere averaging of exp(beta H), stabilized by
// shifting with the largest sampled exponent.
ZnEstimate zn_direct_mc(const Spectrum& s, double beta, long samples,
                        std::mt19937_64& rng);

// log E[exp((n beta / 2)(spike r_0 + sum_i lambda_bulk_i r_i))] / n where
// (r_0, r) is the K-block coarsening of a uniform sphere point,
// K in {1, 2, 3}. Nested log-shifted quadrature.
double blocked_expectation_quadrature(int K, int n, double beta,
                                      const std::vector<double>& lambda_bulk,
                                      double spike);

// Normalized density of eta_coord^2 under the Gibbs measure for n <= 6,
// computed by recursive quadrature over the remaining coordinates.
std::function<double(double)> exact_density_small_n(const Spectrum& s, double beta,
                                                    int coord);

// Modified Bessel function of order zero: power series for small arguments,
// asymptotic expansion for large ones.
double bessel_i0(double x);

}  // namespace oracle
}  // namespace twospike
