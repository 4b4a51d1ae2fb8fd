#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmclab/grid.hpp"
#include "gmclab/logfield.hpp"

namespace gmclab {

enum class Normalization { kRaw, kProbability };

std::string to_string(Normalization n);

struct GmcParameters {
  double gamma;  // in [0, 2]; gamma == 2 is the critical (Seneta-Heyde) case
  ScaleParameter epsilon;
  Normalization normalization = Normalization::kRaw;
};

struct Provenance {
  std::string tag = "gmc";  // "gmc" or a synthetic label
  std::uint64_t seed = 0;
  double gamma = 0.0;
  int eps_log2 = 0;
  Normalization normalization = Normalization::kRaw;
};

/// Nonnegative masses on the 2^n dyadic cells of [0,1].  Totals and interval
/// masses are pairwise (dyadic-tree) sums, so coarsening conserves the total
/// bit-exactly.
struct DyadicMeasure {
  int resolution = 0;
  std::vector<double> masses;
  double total = 0.0;
  Provenance provenance;
};

/// Chaos weights per grid point:
///   subcritical: exp((gamma/2) v_j - (gamma^2/8) sigma^2)
///   critical:    sqrt(log(1/eps)) exp(v_j - sigma^2/2)
/// with sigma^2 = 2 (log(1/eps) + 1).
std::vector<double> density_weights(const FieldSample& field, const GmcParameters& params);

/// Midpoint-rule measure: mass_j = weight_j * 2^-n.  Requires 2^-n >= eps.
DyadicMeasure build_measure(const FieldSample& field, const GmcParameters& params);

/// Sum children into 2^{n_target} cells; total conserved bit-exactly.
DyadicMeasure coarsen(const DyadicMeasure& mu, int n_target);

/// Exact mass of a dyadic interval with level <= resolution.
double interval_mass(const DyadicMeasure& mu, const DyadicInterval& iv);

/// Lebesgue measure at resolution n (all masses 2^-n).
DyadicMeasure lebesgue(int n);

/// Synthetic measure from explicit masses.
DyadicMeasure measure_from_masses(int n, std::vector<double> masses, const std::string& tag);

/// Probability-rescaled copy.
DyadicMeasure normalized(const DyadicMeasure& mu);

/// CSV dump (index, left_endpoint, mass) and JSON metadata sidecar.
void write_measure_csv(const DyadicMeasure& mu, const std::string& path);
void write_measure_meta(const DyadicMeasure& mu, const std::string& path);
DyadicMeasure read_measure_csv(const std::string& path);

}  // namespace gmclab
