#include "gmclab/capacity.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "gmclab/numeric.hpp"

namespace gmclab {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Exact cell-pair energies per unit mass^2 at lag d (cells of length l).
// Log kernel: I(d)/l^2 = log 2 + 3/2 - log l - T(d)/2 with
//   T(d) = (d+1)^2 log(d+1) - 2 d^2 log d + (d-1)^2 log(d-1),
// rewritten via log1p to avoid cancellation at large d.
std::vector<double> log_kernel_entries(int resolution) {
  const std::size_t n = std::size_t{1} << resolution;
  const double log_l = -static_cast<double>(resolution) * kLn2;
  std::vector<double> ent(n);
  ent[0] = kLn2 + 1.5 - log_l;
  if (n > 1) ent[1] = 1.5 - kLn2 - log_l;
  for (std::size_t i = 2; i < n; ++i) {
    const double d = static_cast<double>(i);
    const double t = 2.0 * std::log(d) + (d * d + 1.0) * std::log1p(-1.0 / (d * d)) +
                     2.0 * d * (std::log1p(1.0 / d) - std::log1p(-1.0 / d));
    ent[i] = kLn2 + 1.5 - log_l - 0.5 * t;
  }
  return ent;
}

// Riesz kernel: I(d)/l^2 = l^-s [ (d+1)^a - 2 d^a + (d-1)^a ] / ((1-s)(2-s)),
// a = 2-s; diagonal l^-s * 2/((1-s)(2-s)).  The second difference switches to
// a series for large d where direct evaluation cancels.
std::vector<double> riesz_kernel_entries(int resolution, double s) {
  const std::size_t n = std::size_t{1} << resolution;
  const double a = 2.0 - s;
  const double denom = (1.0 - s) * (2.0 - s);
  const double l_pow = std::pow(std::ldexp(1.0, -resolution), -s);
  std::vector<double> ent(n);
  ent[0] = l_pow * 2.0 / denom;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = static_cast<double>(i);
    double second;
    if (i <= 512) {
      second = std::pow(d + 1.0, a) - 2.0 * std::pow(d, a) + std::pow(d - 1.0, a);
    } else {
      const double x2 = 1.0 / (d * d);
      const double c1 = (a - 2.0) * (a - 3.0) / 12.0;
      const double c2 = (a - 2.0) * (a - 3.0) * (a - 4.0) * (a - 5.0) / 360.0;
      second = std::pow(d, a) * a * (a - 1.0) * x2 * (1.0 + c1 * x2 + c2 * x2 * x2);
    }
    ent[i] = l_pow * second / denom;
  }
  return ent;
}

// Mass autocorrelation w_d = sum_i m_i m_{i+d}; direct for small N, padded
// FFT beyond.
std::vector<double> autocorrelation(const std::vector<double>& m) {
  const std::size_t n = m.size();
  std::vector<double> w(n, 0.0);
  if (n <= 4096) {
    for (std::size_t d = 0; d < n; ++d) {
      double acc = 0.0;
      for (std::size_t i = 0; i + d < n; ++i) acc += m[i] * m[i + d];
      w[d] = acc;
    }
  } else {
    const std::size_t padded = 2 * n;
    std::vector<std::complex<double>> in(padded), sp(padded);
    for (std::size_t i = 0; i < n; ++i) in[i] = m[i];
    thread_local Eigen::FFT<double> fft;
    fft.fwd(sp, in);
    for (auto& v : sp) v = std::complex<double>(std::norm(v), 0.0);
    fft.inv(in, sp);
    for (std::size_t d = 0; d < n; ++d) w[d] = in[d].real();
  }
  return w;
}

double quadratic_energy(const DyadicMeasure& mu, const std::vector<double>& ent) {
  const std::vector<double> w = autocorrelation(mu.masses);
  double e = ent[0] * w[0];
  for (std::size_t d = 1; d < w.size(); ++d) e += 2.0 * ent[d] * w[d];
  return e;
}

void require_probability(const DyadicMeasure& mu, const char* what) {
  if (std::fabs(mu.total - 1.0) > 1e-9)
    throw Error(std::string(what) + " requires a probability-normalized measure (total = " +
                std::to_string(mu.total) + ")");
}

}  // namespace

EnergyReport log_energy(const DyadicMeasure& mu) {
  require_probability(mu, "log_energy");
  EnergyReport r;
  r.kernel = EnergyKernel::kLog;
  r.resolution = mu.resolution;
  r.value = quadratic_energy(mu, log_kernel_entries(mu.resolution));
  r.infinite = !std::isfinite(r.value);
  return r;
}

EnergyReport riesz_energy(const DyadicMeasure& mu, double s) {
  if (!(s > 0.0) || !(s < 1.0))
    throw Error("riesz_energy supports exponents 0 < s < 1 only");
  require_probability(mu, "riesz_energy");
  EnergyReport r;
  r.kernel = EnergyKernel::kRiesz;
  r.s = s;
  r.resolution = mu.resolution;
  r.value = quadratic_energy(mu, riesz_kernel_entries(mu.resolution, s));
  r.infinite = !std::isfinite(r.value);
  return r;
}

DyadicMeasure pullback(const DyadicMeasure& nu, const MonotoneMap& map, int n_out) {
  require_probability(nu, "pullback");
  validate(map);
  // piecewise-linear CDF of nu (uniform density within each cell)
  const std::size_t n_cells = nu.masses.size();
  std::vector<double> cum(n_cells + 1, 0.0);
  for (std::size_t j = 0; j < n_cells; ++j) cum[j + 1] = cum[j] + nu.masses[j];
  const auto cdf_nu = [&](double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return cum[n_cells];
    const double scaled = std::ldexp(t, nu.resolution);
    const auto k = static_cast<std::size_t>(scaled);
    return cum[k] + (scaled - static_cast<double>(k)) * nu.masses[k];
  };

  const std::vector<double> pts = evaluate_on_dyadic_points(map, n_out);
  std::vector<double> masses(std::size_t{1} << n_out);
  for (std::size_t j = 0; j < masses.size(); ++j)
    masses[j] = std::max(0.0, cdf_nu(pts[j + 1]) - cdf_nu(pts[j]));
  DyadicMeasure out = measure_from_masses(n_out, std::move(masses), "pullback");
  out.provenance.seed = nu.provenance.seed;
  out.provenance.gamma = nu.provenance.gamma;
  return out;
}

namespace {

// Euclidean projection onto the probability simplex.
void project_simplex(std::vector<double>& v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, theta = 0.0;
  std::size_t rho = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    const double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) {
      rho = i;
      theta = t;
    }
  }
  (void)rho;
  for (double& x : v) x = std::max(0.0, x - theta);
}

}  // namespace

EquilibriumResult equilibrium_measure(const IntervalSelection& support,
                                      const EquilibriumOptions& opts) {
  if (support.selected.empty()) throw Error("equilibrium_measure needs a nonempty selection");
  const std::size_t ns = support.selected.size();
  if (ns > 4096)
    throw CapacityLimitError("equilibrium solver is limited to 4096 support cells");
  const std::vector<double> ent = log_kernel_entries(support.resolution);

  // L bounds the largest eigenvalue of K through the largest full-grid row
  // sum: row i sums ent over lags 1..i and 1..N-1-i plus the diagonal.
  std::vector<double> prefix(ent.size(), 0.0);
  for (std::size_t d = 1; d < ent.size(); ++d) prefix[d] = prefix[d - 1] + ent[d];
  double row_sum = 0.0;
  for (std::size_t i = 0; i < ent.size(); ++i)
    row_sum = std::max(row_sum, ent[0] + prefix[i] + prefix[ent.size() - 1 - i]);
  const double step = 1.0 / (2.0 * row_sum);

  const auto& idx = support.selected;
  std::vector<double> m(ns, 1.0 / static_cast<double>(ns)), km(ns), m_new(ns);
  const auto apply_k = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (std::size_t i = 0; i < ns; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < ns; ++j) {
        const auto d = static_cast<std::size_t>(
            std::abs(static_cast<long>(idx[i]) - static_cast<long>(idx[j])));
        acc += ent[d] * v[j];
      }
      out[i] = acc;
    }
  };

  EquilibriumResult res;
  apply_k(m, km);
  double energy = std::inner_product(m.begin(), m.end(), km.begin(), 0.0);
  double pg_norm = 0.0, gap = 0.0;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    // Frank-Wolfe gap: for a convex quadratic on the simplex,
    // E(m) - E* <= <grad, m> - min_j grad_j.
    double gdot = 0.0, gmin = 2.0 * km[0];
    for (std::size_t i = 0; i < ns; ++i) {
      gdot += 2.0 * km[i] * m[i];
      gmin = std::min(gmin, 2.0 * km[i]);
    }
    gap = gdot - gmin;
    if (gap <= opts.gap_tolerance) {
      res.converged = true;
      break;
    }
    for (std::size_t i = 0; i < ns; ++i) m_new[i] = m[i] - step * 2.0 * km[i];
    project_simplex(m_new);
    double diff2 = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
      const double d = m_new[i] - m[i];
      diff2 += d * d;
    }
    pg_norm = std::sqrt(diff2) / step;
    m.swap(m_new);
    apply_k(m, km);
    const double energy_new = std::inner_product(m.begin(), m.end(), km.begin(), 0.0);
    if (energy_new > energy + 1e-12 * std::max(1.0, std::fabs(energy))) res.descent_ok = false;
    energy = energy_new;
    if (pg_norm <= opts.grad_tolerance) {
      res.converged = true;
      ++it;
      break;
    }
  }
  if (!res.converged)
    throw ConvergenceError("equilibrium solver exhausted its iteration budget; "
                           "projected-gradient norm " + std::to_string(pg_norm) +
                           ", optimality gap " + std::to_string(gap),
                           pg_norm);

  std::vector<double> full(std::size_t{1} << support.resolution, 0.0);
  for (std::size_t i = 0; i < ns; ++i) full[idx[i]] = m[i];
  res.measure = measure_from_masses(support.resolution, std::move(full), "equilibrium");
  res.energy.kernel = EnergyKernel::kLog;
  res.energy.resolution = support.resolution;
  res.energy.value = energy;
  res.iterations = it;
  res.projected_gradient_norm = pg_norm;
  res.optimality_gap = gap;
  return res;
}

PolarityReport polarity_score(std::span<const IntervalSelection> supports,
                              const EquilibriumOptions& opts) {
  if (supports.size() < 3)
    throw InsufficientDataError("polarity score needs >= 3 resolutions");
  PolarityReport rep;
  int prev = 0;
  for (const auto& sel : supports) {
    if (sel.resolution <= prev) throw Error("polarity supports must come at increasing resolutions");
    prev = sel.resolution;
    const EquilibriumResult eq = equilibrium_measure(sel, opts);
    rep.resolutions.push_back(sel.resolution);
    rep.energies.push_back(eq.energy.value);
  }
  std::vector<double> xs(rep.resolutions.begin(), rep.resolutions.end());
  rep.growth_rate = lsq_slope(xs, rep.energies);
  return rep;
}

}  // namespace gmclab
