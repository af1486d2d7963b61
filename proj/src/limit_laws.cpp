#include "twospike/limit_laws.hpp"

#include <algorithm>
#include <cmath>

#include "twospike/errors.hpp"
#include "twospike/rng.hpp"

namespace twospike {

OverlapLimitLaw make_limit_law(double beta, double J, double c) {
  require(J > 1.0, errc::regime_violation, "need J > 1");
  require(beta * J > 1.0, errc::regime_violation, "need beta J > 1");
  require(c >= 0.0, errc::domain, "need c >= 0");
  OverlapLimitLaw law;
  law.beta = beta;
  law.J = J;
  law.c = c;
  law.r0_hat = 1.0 - 1.0 / (beta * J);
  law.a = 0.5 * c * beta;
  law.s_law = make_tilted_arcsine(law.r0_hat, law.a);
  return law;
}

double sample_limit_overlap(const OverlapLimitLaw& law, std::mt19937_64& rng) {
  double s1 = sample_tilted_arcsine(law.s_law, rng);
  double s2 = sample_tilted_arcsine(law.s_law, rng);
  double z1 = (rng() >> 63) ? 1.0 : -1.0;
  double z2 = (rng() >> 63) ? 1.0 : -1.0;
  return z1 * std::sqrt(s1 * s2) +
         z2 * std::sqrt((law.r0_hat - s1) * (law.r0_hat - s2));
}

namespace {
constexpr std::uint64_t kCdfSeed = 0x7ab1e5eedULL;
}

LimitAbsCdf::LimitAbsCdf(const OverlapLimitLaw& law, long samples) {
  require(samples >= 1, errc::domain, "need at least one sample");
  auto rng = make_stream(kCdfSeed, 0, stream::overlap_limit);
  sorted_.resize(static_cast<size_t>(samples));
  for (auto& v : sorted_) v = std::abs(sample_limit_overlap(law, rng));
  std::sort(sorted_.begin(), sorted_.end());
}

double LimitAbsCdf::operator()(double x) const {
  auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double LimitAbsCdf::dkw_halfwidth() const {
  return std::sqrt(std::log(2.0 / 0.001) / (2.0 * static_cast<double>(sorted_.size())));
}

double limit_cdf_abs(const OverlapLimitLaw& law, double x, long mc_samples) {
  require(mc_samples >= 100000, errc::domain, "need mc_samples >= 1e5");
  auto rng = make_stream(kCdfSeed, 0, stream::overlap_limit);
  long hits = 0;
  for (long t = 0; t < mc_samples; ++t)
    if (std::abs(sample_limit_overlap(law, rng)) <= x) ++hits;
  return static_cast<double>(hits) / static_cast<double>(mc_samples);
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), errc::empty_selection, "empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_distance(std::vector<double> sample,
                   const std::function<double(double)>& ref_cdf) {
  require(sample.size() >= 100, errc::domain, "need at least 100 samples");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (size_t i = 0; i < sample.size(); ++i) {
    double f = ref_cdf(sample[i]);
    d = std::max(d, std::abs((i + 1.0) / n - f));
    d = std::max(d, std::abs(static_cast<double>(i) / n - f));
  }
  return d;
}

double ks_distance(std::vector<double> sample, const LimitAbsCdf& ref) {
  return ks_distance(std::move(sample), [&ref](double x) { return ref(x); });
}

}  // namespace twospike
