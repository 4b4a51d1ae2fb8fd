#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "gmclab/errors.hpp"

namespace gmclab {

/// Pairwise (binary-tree) summation.  For power-of-two lengths the reduction
/// tree coincides with the dyadic cell tree, so block sums of dyadic blocks
/// recombine bit-exactly to the full-array sum.
inline double pairwise_sum(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  if (n == 1) return v[0];
  const std::size_t half = n / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

inline MeanSe mean_se(std::span<const double> v) {
  MeanSe r;
  r.n = v.size();
  if (r.n == 0) return r;
  r.mean = pairwise_sum(v) / static_cast<double>(r.n);
  if (r.n < 2) return r;
  double ss = 0.0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.se = std::sqrt(ss / (static_cast<double>(r.n) * (static_cast<double>(r.n) - 1.0)));
  return r;
}

/// Least-squares slope of y against x.
inline double lsq_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InsufficientDataError("lsq_slope: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= n;
  ym /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  if (sxx == 0.0) throw InsufficientDataError("lsq_slope: degenerate abscissa");
  return sxy / sxx;
}

}  // namespace gmclab
