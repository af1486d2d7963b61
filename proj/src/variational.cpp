#include "twospike/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "twospike/errors.hpp"
#include "twospike/semicircle.hpp"

namespace twospike {

VariationalProblem make_variational(int K, double beta, double J) {
  require(K >= 1, errc::domain, "need K >= 1");
  require(beta > 0.0, errc::domain, "need beta > 0");
  require(J > 1.0, errc::regime_violation, "need J > 1");
  require(beta * J > 1.0, errc::regime_violation, "need beta J > 1");
  VariationalProblem p;
  p.K = K;
  p.beta = beta;
  p.J = J;
  p.lambda_tilde.resize(static_cast<size_t>(K) + 1);
  p.lambda_tilde[0] = J + 1.0 / J;
  auto q = sc_quantiles(K);
  for (int i = 1; i <= K; ++i) p.lambda_tilde[static_cast<size_t>(i)] = q.bin_upper(i);
  return p;
}

double objective_f(const VariationalProblem& p, const std::vector<double>& r) {
  require(r.size() == p.lambda_tilde.size(), errc::dimension_mismatch,
          "point dimension must be K + 1");
  double sum = 0.0, lin = 0.0, logs = 0.0;
  for (size_t i = 0; i < r.size(); ++i) {
    require(r[i] >= 0.0, errc::domain, "coordinates must be nonnegative");
    sum += r[i];
    lin += p.lambda_tilde[i] * r[i];
    if (i >= 1) {
      require(r[i] > 0.0, errc::domain, "bulk coordinates must be positive");
      logs += std::log(r[i]);
    }
  }
  require(std::abs(sum - 1.0) < 1e-9, errc::domain, "coordinates must sum to 1");
  return 0.5 * p.beta * lin + 0.5 * std::log(static_cast<double>(p.K)) +
         logs / (2.0 * p.K);
}

VariationalSolution solve_lagrange(const VariationalProblem& p) {
  VariationalSolution sol;
  sol.gamma = p.beta * p.lambda_tilde[0];
  sol.r_hat.resize(p.lambda_tilde.size());
  double bulk_sum = 0.0;
  for (int i = 1; i <= p.K; ++i) {
    double denom = sol.gamma - p.beta * p.lambda_tilde[static_cast<size_t>(i)];
    sol.r_hat[static_cast<size_t>(i)] = 1.0 / (p.K * denom);
    bulk_sum += sol.r_hat[static_cast<size_t>(i)];
  }
  double r0 = 1.0 - bulk_sum;
  require(r0 > 0.0, errc::k_too_small,
          "bulk mass " + std::to_string(bulk_sum) + " leaves no room for the spike");
  sol.r_hat[0] = r0;
  sol.f_opt = objective_f(p, sol.r_hat);
  double res = 0.0;
  for (int i = 1; i <= p.K; ++i) {
    double grad = 0.5 * p.beta * p.lambda_tilde[static_cast<size_t>(i)] +
                  0.5 / (p.K * sol.r_hat[static_cast<size_t>(i)]);
    res = std::max(res, std::abs(grad - 0.5 * sol.gamma));
  }
  sol.kkt_residual = res;
  sol.stieltjes_err = std::abs(bulk_sum - 1.0 / (p.beta * p.J));
  return sol;
}

double free_energy_limit(double beta, double J) {
  require(J > 1.0, errc::regime_violation, "need J > 1");
  require(beta * J > 1.0, errc::regime_violation, "need beta J > 1");
  double top = J + 1.0 / J;
  return 0.5 * beta * top * (1.0 - 1.0 / (beta * J)) +
         0.5 * std::log(1.0 / (beta * J)) + 0.25 / (J * J);
}

GapReport gap_scan(const VariationalProblem& p, const VariationalSolution& sol,
                   const std::vector<double>& deltas, int samples_per_delta,
                   std::mt19937_64& rng) {
  require(!deltas.empty(), errc::domain, "need at least one delta");
  require(samples_per_delta >= 1, errc::domain, "need samples_per_delta >= 1");
  const size_t m = sol.r_hat.size();
  require(m == p.lambda_tilde.size(), errc::dimension_mismatch,
          "solution does not match the problem");
  for (double delta : deltas) {
    require(delta > 0.0, errc::domain, "deltas must be positive");
    require(delta < 0.5 * sol.r_hat[0], errc::domain,
            "delta exceeds half the spike mass");
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  GapReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  rep.gamma_fit = std::numeric_limits<double>::infinity();

  std::vector<double> w(m), e(m), r(m);
  for (double delta : deltas) {
    // Per-coordinate caps keep every perturbed coordinate above half its
    // optimal value; the spike slot always has room to carry the sup norm.
    for (size_t i = 1; i < m; ++i) w[i] = std::min(delta, 0.45 * sol.r_hat[i]);

    GapDeltaStat st;
    st.delta = delta;
    st.samples = samples_per_delta;
    st.worst_margin = std::numeric_limits<double>::infinity();

    int produced = 0;
    int attempts = 0;
    const int max_attempts = samples_per_delta * 1000;
    while (produced < samples_per_delta) {
      require(++attempts <= max_attempts, errc::sampler_stall,
              "perturbation sampler kept rejecting");
      double sum = 0.0;
      for (size_t i = 1; i < m; ++i) {
        e[i] = gauss(rng) * w[i];
        sum += e[i];
      }
      e[0] = -sum;  // the spike slot absorbs the mass balance
      double sup = 0.0;
      for (size_t i = 0; i < m; ++i) sup = std::max(sup, std::abs(e[i]));
      if (sup <= 0.0) continue;
      double scale = delta / sup;
      bool ok = true;
      for (size_t i = 0; i < m; ++i) {
        e[i] *= scale;
        if (std::abs(e[i]) > 0.5 * sol.r_hat[i] - 1e-15) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      for (size_t i = 0; i < m; ++i) r[i] = sol.r_hat[i] + e[i];
      double margin = sol.f_opt - objective_f(p, r);
      double fit = margin / (delta * delta);
      if (margin <= 0.0) ++st.violations;
      st.worst_margin = std::min(st.worst_margin, margin);
      st.gamma_fit = produced == 0 ? fit : std::min(st.gamma_fit, fit);
      ++produced;
    }
    rep.violations += st.violations;
    rep.worst_margin = std::min(rep.worst_margin, st.worst_margin);
    rep.gamma_fit = std::min(rep.gamma_fit, st.gamma_fit);
    rep.per_delta.push_back(st);
  }
  return rep;
}

namespace {

double tilde_f_at(double beta, double J, double r0, int& branch) {
  double top = J + 1.0 / J;
  if (beta * (1.0 - r0) < 1.0) {
    branch = 0;
    double m = 1.0 - r0;
    return 0.5 * beta * top * r0 + 0.5 * std::log(m) + 0.25 * beta * beta * m * m;
  }
  branch = 1;
  return 0.5 * beta * (top - 2.0) * r0 + beta - 0.75 - 0.5 * std::log(beta);
}

}  // namespace

Profile profile_tilde_f(double beta, double J, const std::vector<double>& r0_grid) {
  require(beta > 0.0, errc::domain, "need beta > 0");
  require(J > 1.0, errc::regime_violation, "need J > 1");
  require(!r0_grid.empty(), errc::domain, "need a nonempty grid");
  Profile prof;
  prof.points.resize(r0_grid.size());
  double best = -std::numeric_limits<double>::infinity();
  double best_r0 = 0.0;
  for (size_t g = 0; g < r0_grid.size(); ++g) {
    double r0 = r0_grid[g];
    require(r0 > 0.0 && r0 < 1.0, errc::domain, "grid points must lie in (0, 1)");
    ProfilePoint& pt = prof.points[g];
    pt.r0 = r0;
    pt.value = tilde_f_at(beta, J, r0, pt.branch);
    if (pt.value > best) {
      best = pt.value;
      best_r0 = r0;
    }
  }
  // The affine low branch increases and hands over to the concave branch, so
  // the profile is unimodal and a golden-section pass over (0, 1) lands on
  // the global maximum.
  double lo = 1e-12, up = 1.0 - 1e-9;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  int dummy;
  double x1 = up - phi * (up - lo), x2 = lo + phi * (up - lo);
  double f1 = tilde_f_at(beta, J, x1, dummy), f2 = tilde_f_at(beta, J, x2, dummy);
  for (int it = 0; it < 200 && up - lo > 1e-12; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (up - lo);
      f2 = tilde_f_at(beta, J, x2, dummy);
    } else {
      up = x2;
      x2 = x1;
      f2 = f1;
      x1 = up - phi * (up - lo);
      f1 = tilde_f_at(beta, J, x1, dummy);
    }
  }
  prof.argmax_r0 = 0.5 * (lo + up);
  prof.max_value = tilde_f_at(beta, J, prof.argmax_r0, dummy);
  if (prof.max_value < best) {
    prof.argmax_r0 = best_r0;
    prof.max_value = best;
  }
  return prof;
}

Profile profile_tilde_f(double beta, double J, int grid_points) {
  require(grid_points >= 2, errc::domain, "need at least two grid points");
  std::vector<double> grid(static_cast<size_t>(grid_points));
  for (int g = 0; g < grid_points; ++g)
    grid[static_cast<size_t>(g)] = (g + 1.0) / (grid_points + 1.0);
  return profile_tilde_f(beta, J, grid);
}

}  // namespace twospike
