#pragma once

#include <span>
#include <string>
#include <vector>

#include "gmclab/chaos.hpp"
#include "gmclab/fractal.hpp"
#include "gmclab/welding.hpp"

namespace gmclab {

enum class EnergyKernel { kLog, kRiesz };

/// Double energy of the piecewise-uniform density attached to a dyadic
/// measure.  All cell pairs use exact closed-form kernel integrals
/// (uniform-in-cell model); diagonal terms are log(2/l) + 3/2 resp.
/// l^-s * 2/((1-s)(2-s)) per unit mass squared.
struct EnergyReport {
  EnergyKernel kernel = EnergyKernel::kLog;
  double s = 0.0;  // riesz exponent
  double value = 0.0;
  bool infinite = false;
  int resolution = 0;
  std::string diagonal_model = "uniform-in-cell";
};

/// Int log(2/|x-y|) dmu dmu; requires a probability measure.
EnergyReport log_energy(const DyadicMeasure& mu);

/// Int |x-y|^-s dmu dmu, 0 < s < 1; requires a probability measure.
EnergyReport riesz_energy(const DyadicMeasure& mu, double s);

/// Pullback (map^* nu)(A) = nu(map(A)) onto the dyadic cells at n_out;
/// nu is read as a piecewise-uniform probability density.
DyadicMeasure pullback(const DyadicMeasure& nu, const MonotoneMap& map, int n_out);

struct EquilibriumOptions {
  int max_iterations = 20000;
  double grad_tolerance = 1e-8;  // projected-gradient norm
  double gap_tolerance = 1e-4;   // Frank-Wolfe certificate on E - E*
};

struct EquilibriumResult {
  DyadicMeasure measure;
  EnergyReport energy;
  int iterations = 0;
  double projected_gradient_norm = 0.0;
  double optimality_gap = 0.0;  // final Frank-Wolfe gap, bounds E - E*
  bool descent_ok = true;       // objective never increased
  bool converged = false;
};

/// Energy-minimizing probability measure on the selected cells, by projected
/// gradient descent on the simplex (step 1/L, L = row-sum bound of the
/// Hessian 2K).  Minimal energy is the Robin-constant proxy: small energy
/// means large capacity.
EquilibriumResult equilibrium_measure(const IntervalSelection& support,
                                      const EquilibriumOptions& opts = {});

struct PolarityReport {
  std::vector<int> resolutions;
  std::vector<double> energies;
  double growth_rate = 0.0;  // energy slope per level: divergence ~ polar
};

/// Equilibrium energies across nested selections at increasing resolutions.
PolarityReport polarity_score(std::span<const IntervalSelection> supports,
                              const EquilibriumOptions& opts = {});

}  // namespace gmclab
