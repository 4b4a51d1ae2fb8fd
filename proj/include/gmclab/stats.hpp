#pragma once

#include <span>

#include "gmclab/errors.hpp"

namespace gmclab {

struct HillEstimate {
  double index = 0.0;  // tail index 1/H
  double se = 0.0;     // asymptotic standard error index/sqrt(k)
  int k_used = 0;      // exceedances above the cut
};

/// Hill estimator over the top fraction of the sample.
HillEstimate hill_tail_index(std::span<const double> samples, double top_fraction);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test (asymptotic p-value with the usual
/// small-sample correction); both sides need >= 50 entries.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// One-sample KS against N(mean, variance).
KsResult ks_one_sample_normal(std::span<const double> samples, double mean, double variance);

}  // namespace gmclab
