#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gmclab/chaos.hpp"
#include "gmclab/welding.hpp"

namespace gmclab {

/// Gauge profiles: log-power f_k(u) = (log 1/u)^-k, power u^a, both with an
/// optional scale factor c.
struct GaugeFunction {
  enum class Kind { kLogPower, kPower };
  Kind kind = Kind::kLogPower;
  double exponent = 1.0;  // k (log-power) or a (power), > 0
  double scale = 1.0;     // c in c*f
};

double gauge_eval(const GaugeFunction& f, double u);

/// Subset of dyadic cells at one resolution.
struct IntervalSelection {
  enum class Parity { kAll, kEven };
  int resolution = 0;
  std::vector<std::uint32_t> selected;  // sorted cell indices
  Parity parity = Parity::kAll;
};

/// Cells at level n with interval mass >= f(2^-n).
IntervalSelection exceptional_intervals(const DyadicMeasure& mu, const GaugeFunction& f, int n);

/// sum of lengths^alpha.
double covering_sum(std::span<const double> lengths, double alpha);

/// S_n = sum over even level-n cells of (sqrt(n) mu(I))^beta.
double partition_sum(const DyadicMeasure& mu, int n, double beta);

struct LaplaceMomentOptions {
  double lambda_min = 1e-6;
  double lambda_max = 1e3;
  int points_per_decade = 256;
  bool adaptive_range = true;  // extend the grid to cover the sample range
};

struct LaplaceMomentResult {
  double value = 0.0;
  double head_correction = 0.0;  // analytic [0, lambda_min) part
  double tail_correction = 0.0;  // analytic (lambda_max, inf) part
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  int points = 0;
};

/// q-th moment via the Laplace-transform identity
///   E[S^q] = (q / Gamma(1-q)) * Int_0^inf lambda^{-q-1} (1 - E[e^{-lambda S}]) dlambda,
/// evaluated on the empirical Laplace transform (log-spaced trapezoid with
/// closed-form head/tail corrections).
LaplaceMomentResult moment_via_laplace(std::span<const double> samples, double q,
                                       const LaplaceMomentOptions& opts = {});

/// Map values at the 2^n + 1 dyadic points of level n.
std::vector<double> evaluate_on_dyadic_points(const MonotoneMap& m, int n);

/// Image lengths of the 2^n dyadic cells at level n under the map.
std::vector<double> dyadic_image_lengths(const MonotoneMap& m, int n);

/// Per-cell log|map(I)| / log|I| at level n.
std::vector<double> local_exponents(const MonotoneMap& m, int n);

enum class SpectrumSide { kAtLeast, kAtMost, kEqual };

std::string to_string(SpectrumSide s);
SpectrumSide spectrum_side_from_string(const std::string& s);

struct SpectrumEstimate {
  std::vector<double> deltas;
  SpectrumSide side = SpectrumSide::kEqual;
  std::vector<double> dimensions;           // box-counting slope per delta
  std::vector<bool> empty;                  // no cell ever hit the band
  int n_max = 0;
  double bandwidth = 0.0;
  int replicas = 0;
  std::vector<int> scales;                  // n_max/2 .. n_max
  std::vector<std::vector<double>> mean_counts;  // per delta, per scale
};

/// Pools level-set counts over replicas; dimensions are least-squares slopes
/// of log2(mean count) against n over n in [n_max/2, n_max].
class SpectrumAccumulator {
 public:
  SpectrumAccumulator(std::vector<double> deltas, SpectrumSide side, int n_max, double bandwidth);
  void add(const MonotoneMap& m);
  SpectrumEstimate estimate() const;

 private:
  std::vector<double> deltas_;
  SpectrumSide side_;
  int n_max_;
  double bandwidth_;
  std::vector<int> scales_;
  std::vector<std::vector<double>> counts_;
  int replicas_ = 0;
};

SpectrumEstimate spectrum_estimate(const MonotoneMap& m, std::vector<double> deltas,
                                   SpectrumSide side, int n_max, double bandwidth);

struct CoveringReport {
  double alpha = 0.0;
  std::vector<int> scales;
  std::vector<double> sums;
  double slope_per_level = 0.0;  // d log(sum)/dn over scales with positive sums
  double slope_log_scale = 0.0;  // d log(sum)/d log(2^-n) = -slope_per_level/log 2
  bool slope_valid = false;      // >= 3 positive scales
};

/// Per scale, sum of |h_+(I)|^alpha over the selected cells.
CoveringReport image_covering_report(const MonotoneMap& h_plus,
                                     std::span<const IntervalSelection> selections, double alpha);

/// Per scale, sum of |h_+(I)|^alpha over cells with f_k(|I|) < |h_+(I)| and
/// |h(I)| >= |h_+(I)|^{1/2+eta}.
CoveringReport intersection_covering_report(const MonotoneMap& h_plus, const MonotoneMap& h,
                                            double k, double eta, double alpha,
                                            std::span<const int> scales);

}  // namespace gmclab
