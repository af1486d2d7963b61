#pragma once

#include <vector>

namespace twospike {

// Semicircle distribution on [-2, 2].
double sc_density(double x);
double sc_cdf(double x);
double sc_quantile(double p);
double stieltjes_sc(double z);  // (-z + sqrt(z^2 - 4)) / 2, z > 2

// Quantile grid splitting [-2, 2] into K bins of equal semicircle mass.
struct SemicircleQuantiles {
  int K = 0;
  std::vector<double> edges;  // descending, edges[0] = 2, edges[K] = -2

  // 1-based bin index; bin i carries mass between levels 1 - i/K and 1 - (i-1)/K.
  double bin_upper(int i) const { return edges[static_cast<size_t>(i) - 1]; }
  double bin_lower(int i) const { return edges[static_cast<size_t>(i)]; }
  double max_width() const;
};

SemicircleQuantiles sc_quantiles(int K);

}  // namespace twospike
