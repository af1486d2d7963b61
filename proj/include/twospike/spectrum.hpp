#pragma once

#include <random>
#include <string>
#include <vector>

namespace twospike {

enum class SpectrumMode { two_spike, one_spike, goe };

const char* mode_name(SpectrumMode m) noexcept;
SpectrumMode mode_from_name(const std::string& name);

// Eigenvalues of the coupling matrix, sorted descending.
struct Spectrum {
  SpectrumMode mode = SpectrumMode::two_spike;
  int n = 0;
  double J = 0.0;
  double c = 0.0;
  std::vector<double> lambda;

  double top() const { return lambda[0]; }
  double trace() const;
};

// lambda_1 = J + 1/J, lambda_2 = lambda_1 - c/n, bulk at semicircle quantile
// midpoints of an (n-2)-point grid.
Spectrum build_two_spike(int n, double J, double c);

// Single spike at J + 1/J over an (n-1)-point bulk grid.
Spectrum build_one_spike(int n, double J);

// Random GOE spectrum (matrix scaled by 1/sqrt(n)) via the tridiagonal
// beta = 1 ensemble.
Spectrum sample_goe(int n, std::mt19937_64& rng, bool parallel = true);

// Eigenvalues of a symmetric tridiagonal matrix, ascending. Sturm-count
// bisection; 'parallel' toggles the OpenMP split over eigenvalue indices and
// does not change the result.
std::vector<double> tridiag_eigenvalues(const std::vector<double>& diag,
                                        const std::vector<double>& off,
                                        bool parallel = true);

// Worst deviation of bulk eigenvalues from their block's bin upper edge,
// blocks of equal size K over indices 3..n.
struct RigidityReport {
  int K = 0;
  double epsilon = 0.0;
  double worst = 0.0;
  int worst_block = 0;
  bool pass = false;
};

RigidityReport check_rigidity(const Spectrum& s, int K, double epsilon);

void save_spectrum(const Spectrum& s, const std::string& path);
Spectrum load_spectrum(const std::string& path);

}  // namespace twospike
