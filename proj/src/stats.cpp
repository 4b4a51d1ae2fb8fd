#include "gmclab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gmclab {

HillEstimate hill_tail_index(std::span<const double> samples, double top_fraction) {
  if (!(top_fraction > 0.0) || !(top_fraction < 1.0))
    throw Error("hill estimator needs top_fraction in (0,1)");
  const int k = static_cast<int>(std::floor(top_fraction * static_cast<double>(samples.size())));
  if (k < 100)
    throw InsufficientDataError("hill estimator needs >= 100 samples above the cut, got " +
                                std::to_string(k));
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end(), std::greater<>());
  const double cut = x[static_cast<std::size_t>(k)];
  if (!(cut > 0.0)) throw Error("hill estimator needs positive order statistics at the cut");
  double h = 0.0;
  for (int i = 0; i < k; ++i) h += std::log(x[static_cast<std::size_t>(i)] / cut);
  h /= static_cast<double>(k);
  if (!(h > 0.0)) throw Error("hill estimator found no tail (constant upper order statistics)");
  HillEstimate e;
  e.index = 1.0 / h;
  e.se = e.index / std::sqrt(static_cast<double>(k));
  e.k_used = k;
  return e;
}

namespace {

// Kolmogorov survival function Q(lambda) = 2 sum_j (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0, sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 50 || b.size() < 50)
    throw InsufficientDataError("two-sample KS needs >= 50 entries per sample");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  const double na = static_cast<double>(sa.size()), nb = static_cast<double>(sb.size());
  while (i < sa.size() && j < sb.size()) {
    const double v = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] <= v) ++i;
    while (j < sb.size() && sb[j] <= v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  return KsResult{d, kolmogorov_q(lambda)};
}

KsResult ks_one_sample_normal(std::span<const double> samples, double mean, double variance) {
  if (samples.size() < 50) throw InsufficientDataError("one-sample KS needs >= 50 entries");
  if (!(variance > 0.0)) throw Error("one-sample KS needs positive variance");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  const double inv_sigma = 1.0 / std::sqrt(variance);
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = 0.5 * std::erfc(-(s[i] - mean) * inv_sigma * 0.7071067811865476);
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
  }
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  return KsResult{d, kolmogorov_q(lambda)};
}

}  // namespace gmclab
