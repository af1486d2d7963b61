#pragma once

#include <functional>

namespace twospike {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // accumulated estimate, usually very conservative
  long evaluations = 0;
};

// Adaptive quadrature on [a, b]: paired 7- and 15-point Gauss rules per
// interval, difference as the error estimate, bisection until tolerance.
// Nodes and weights are computed once at startup by Newton iteration on the
// Legendre recurrence.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-12, double rel_tol = 1e-12,
                     int max_depth = 48);

inline double integral(const std::function<double(double)>& f, double a, double b,
                       double abs_tol = 1e-12, double rel_tol = 1e-12) {
  return integrate(f, a, b, abs_tol, rel_tol).value;
}

}  // namespace twospike
