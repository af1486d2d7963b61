#include "twospike/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

#include "twospike/errors.hpp"
#include "twospike/semicircle.hpp"

namespace twospike {

const char* mode_name(SpectrumMode m) noexcept {
  switch (m) {
    case SpectrumMode::two_spike: return "two_spike";
    case SpectrumMode::one_spike: return "one_spike";
    case SpectrumMode::goe: return "goe";
  }
  return "unknown";
}

SpectrumMode mode_from_name(const std::string& name) {
  if (name == "two_spike") return SpectrumMode::two_spike;
  if (name == "one_spike") return SpectrumMode::one_spike;
  if (name == "goe") return SpectrumMode::goe;
  fail(errc::domain, "unknown spectrum mode '" + name + "'");
}

double Spectrum::trace() const {
  return std::accumulate(lambda.begin(), lambda.end(), 0.0);
}

Spectrum build_two_spike(int n, double J, double c) {
  require(n >= 4, errc::domain, "need n >= 4");
  require(J > 1.0, errc::regime_violation, "need J > 1");
  require(c >= 0.0, errc::domain, "need c >= 0");
  double top = J + 1.0 / J;
  double second = top - c / n;
  require(second > 2.0, errc::regime_violation,
          "second eigenvalue would not clear the bulk edge");
  Spectrum s;
  s.mode = SpectrumMode::two_spike;
  s.n = n;
  s.J = J;
  s.c = c;
  s.lambda.resize(static_cast<size_t>(n));
  s.lambda[0] = top;
  s.lambda[1] = second;
  int m = n - 2;
  for (int i = 3; i <= n; ++i)
    s.lambda[static_cast<size_t>(i) - 1] = sc_quantile((n - i + 0.5) / m);
  return s;
}

Spectrum build_one_spike(int n, double J) {
  require(n >= 3, errc::domain, "need n >= 3");
  require(J > 1.0, errc::regime_violation, "need J > 1");
  Spectrum s;
  s.mode = SpectrumMode::one_spike;
  s.n = n;
  s.J = J;
  s.c = 0.0;
  s.lambda.resize(static_cast<size_t>(n));
  s.lambda[0] = J + 1.0 / J;
  int m = n - 1;
  for (int i = 2; i <= n; ++i)
    s.lambda[static_cast<size_t>(i) - 1] = sc_quantile((n - i + 0.5) / m);
  return s;
}

namespace {

// Eigenvalues of T - x below x, counted through the signs of the LDL^T pivots.
int sturm_count(const std::vector<double>& d, const std::vector<double>& e2, double x) {
  constexpr double pivmin = 1e-300;
  int count = 0;
  double q = d[0] - x;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (size_t i = 1; i < d.size(); ++i) {
    q = d[i] - x - e2[i - 1] / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

double bisect_eigenvalue(const std::vector<double>& d, const std::vector<double>& e2,
                         int k, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (sturm_count(d, e2, mid) > k)
      hi = mid;
    else
      lo = mid;
    if (hi - lo < 1e-13 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> tridiag_eigenvalues(const std::vector<double>& diag,
                                        const std::vector<double>& off,
                                        bool parallel) {
  const int n = static_cast<int>(diag.size());
  require(n >= 1, errc::domain, "empty matrix");
  require(off.size() + 1 == diag.size(), errc::dimension_mismatch,
          "off-diagonal length must be n - 1");

  std::vector<double> e2(off.size());
  for (size_t i = 0; i < off.size(); ++i) e2[i] = off[i] * off[i];

  double lo = diag[0], hi = diag[0];
  for (int i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(off[static_cast<size_t>(i) - 1]);
    if (i + 1 < n) r += std::abs(off[static_cast<size_t>(i)]);
    lo = std::min(lo, diag[static_cast<size_t>(i)] - r);
    hi = std::max(hi, diag[static_cast<size_t>(i)] + r);
  }
  lo -= 1e-10;
  hi += 1e-10;

  std::vector<double> ev(static_cast<size_t>(n));
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
  for (int k = 0; k < n; ++k)
    ev[static_cast<size_t>(k)] = bisect_eigenvalue(diag, e2, k, lo, hi);
  return ev;
}

Spectrum sample_goe(int n, std::mt19937_64& rng, bool parallel) {
  require(n >= 1, errc::domain, "need n >= 1");
  std::vector<double> d(static_cast<size_t>(n)), e(static_cast<size_t>(n) - 1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i)
    d[static_cast<size_t>(i)] = std::sqrt(2.0) * gauss(rng) * inv_sqrt_n;
  for (int i = 1; i < n; ++i) {
    // chi_(n-i) via the gamma distribution
    std::gamma_distribution<double> g(0.5 * (n - i), 2.0);
    e[static_cast<size_t>(i) - 1] = std::sqrt(g(rng)) * inv_sqrt_n;
  }
  Spectrum s;
  s.mode = SpectrumMode::goe;
  s.n = n;
  s.lambda = tridiag_eigenvalues(d, e, parallel);
  std::sort(s.lambda.begin(), s.lambda.end(), std::greater<>());
  return s;
}

RigidityReport check_rigidity(const Spectrum& s, int K, double epsilon) {
  require(K >= 1, errc::domain, "need K >= 1");
  require(epsilon > 0.0, errc::domain, "need epsilon > 0");
  const int m = s.n - 2;
  require(m >= 1, errc::domain, "spectrum has no bulk");
  require(m % K == 0, errc::block_mismatch,
          "K = " + std::to_string(K) + " does not divide n - 2 = " + std::to_string(m));
  auto q = sc_quantiles(K);
  RigidityReport rep;
  rep.K = K;
  rep.epsilon = epsilon;
  const int block = m / K;
  for (int i = 1; i <= K; ++i) {
    double edge = q.bin_upper(i);
    for (int j = (i - 1) * block + 3; j <= i * block + 2; ++j) {
      double dev = std::abs(s.lambda[static_cast<size_t>(j) - 1] - edge);
      if (dev > rep.worst) {
        rep.worst = dev;
        rep.worst_block = i;
      }
    }
  }
  rep.pass = rep.worst <= epsilon;
  return rep;
}

void save_spectrum(const Spectrum& s, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), errc::domain, "cannot open '" + path + "' for writing");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", s.J);
  out << "# n=" << s.n << " mode=" << mode_name(s.mode) << " J=" << buf;
  std::snprintf(buf, sizeof buf, "%.17g", s.c);
  out << " c=" << buf << "\n";
  for (double v : s.lambda) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << "\n";
  }
  require(out.good(), errc::domain, "write to '" + path + "' failed");
}

Spectrum load_spectrum(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::domain, "cannot open '" + path + "'");
  std::string header;
  std::getline(in, header);
  Spectrum s;
  int n = 0;
  {
    std::istringstream hs(header);
    std::string tok;
    hs >> tok;
    require(tok == "#", errc::domain, "missing header line in '" + path + "'");
    std::string mode;
    while (hs >> tok) {
      auto eq = tok.find('=');
      require(eq != std::string::npos, errc::domain, "bad header field '" + tok + "'");
      std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      if (key == "n")
        n = std::stoi(val);
      else if (key == "mode")
        s.mode = mode_from_name(val);
      else if (key == "J")
        s.J = std::stod(val);
      else if (key == "c")
        s.c = std::stod(val);
      else
        fail(errc::domain, "unknown header key '" + key + "'");
    }
  }
  require(n >= 1, errc::domain, "header lacks a valid n");
  s.n = n;
  s.lambda.reserve(static_cast<size_t>(n));
  double v;
  while (in >> v) s.lambda.push_back(v);
  require(static_cast<int>(s.lambda.size()) == n, errc::dimension_mismatch,
          "expected " + std::to_string(n) + " eigenvalues, found " +
              std::to_string(s.lambda.size()));
  for (size_t i = 1; i < s.lambda.size(); ++i)
    require(s.lambda[i - 1] >= s.lambda[i], errc::domain,
            "eigenvalues in '" + path + "' are not sorted descending");
  return s;
}

}  // namespace twospike
