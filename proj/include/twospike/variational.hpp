#pragma once

#include <random>
#include <vector>

namespace twospike {

// Finite-K free energy surrogate over the simplex (r_0, r_1, ..., r_K):
//   f(r) = (beta/2) sum_i lambda_tilde_i r_i
//        + (1/2) log K + (1/(2K)) sum_{i>=1} log r_i
// Slot 0 holds the spike level J + 1/J, slots 1..K the semicircle bin upper
// edges.
struct VariationalProblem {
  int K = 0;
  double beta = 0.0;
  double J = 0.0;
  std::vector<double> lambda_tilde;  // size K + 1
};

VariationalProblem make_variational(int K, double beta, double J);

double objective_f(const VariationalProblem& p, const std::vector<double>& r);

struct VariationalSolution {
  std::vector<double> r_hat;  // interior maximizer, size K + 1
  double gamma = 0.0;         // Lagrange multiplier beta (J + 1/J)
  double f_opt = 0.0;
  double kkt_residual = 0.0;
  double stieltjes_err = 0.0;  // |sum_{i>=1} r_hat_i - 1/(beta J)|
};

VariationalSolution solve_lagrange(const VariationalProblem& p);

// Closed-form limit value; requires beta J > 1.
double free_energy_limit(double beta, double J);

struct GapDeltaStat {
  double delta = 0.0;
  int samples = 0;
  long violations = 0;
  double worst_margin = 0.0;  // smallest f(r_hat) - f(r) seen at this delta
  double gamma_fit = 0.0;     // min margin / delta^2
};

struct GapReport {
  double gamma_fit = 0.0;
  long violations = 0;
  double worst_margin = 0.0;
  std::vector<GapDeltaStat> per_delta;
};

// Samples perturbations with sup-norm exactly delta, zero sum, and every
// coordinate kept above half its optimal value, then checks the quadratic
// decay of f below f_opt.
GapReport gap_scan(const VariationalProblem& p, const VariationalSolution& sol,
                   const std::vector<double>& deltas, int samples_per_delta,
                   std::mt19937_64& rng);

struct ProfilePoint {
  double r0 = 0.0;
  double value = 0.0;
  int branch = 0;  // 0: beta (1 - r0) < 1, 1: otherwise
};

struct Profile {
  std::vector<ProfilePoint> points;
  double argmax_r0 = 0.0;
  double max_value = 0.0;
};

// Limit free energy profile as a function of the spike mass r0. The grid
// must lie inside (0, 1); the reported maximum is polished beyond the grid.
Profile profile_tilde_f(double beta, double J, const std::vector<double>& r0_grid);
Profile profile_tilde_f(double beta, double J, int grid_points);  // uniform interior grid

}  // namespace twospike
