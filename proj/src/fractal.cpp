#include "gmclab/fractal.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "gmclab/numeric.hpp"

namespace gmclab {

namespace {
constexpr double kLn2 = 0.6931471805599453;
}

double gauge_eval(const GaugeFunction& f, double u) {
  if (!(u > 0.0) || !(u < 1.0)) throw Error("gauge argument must lie in (0,1)");
  if (!(f.exponent > 0.0)) throw Error("gauge exponent must be positive");
  if (f.kind == GaugeFunction::Kind::kLogPower)
    return f.scale * std::pow(std::log(1.0 / u), -f.exponent);
  return f.scale * std::pow(u, f.exponent);
}

IntervalSelection exceptional_intervals(const DyadicMeasure& mu, const GaugeFunction& f, int n) {
  if (n > mu.resolution) throw Error("selection level exceeds measure resolution");
  const double threshold = gauge_eval(f, std::ldexp(1.0, -n));
  const DyadicMeasure coarse = coarsen(mu, n);
  IntervalSelection sel;
  sel.resolution = n;
  for (std::size_t j = 0; j < coarse.masses.size(); ++j)
    if (coarse.masses[j] >= threshold) sel.selected.push_back(static_cast<std::uint32_t>(j));
  return sel;
}

double covering_sum(std::span<const double> lengths, double alpha) {
  if (!(alpha >= 0.0)) throw Error("covering_sum needs alpha >= 0");
  double s = 0.0;
  for (double l : lengths) {
    if (!(l > 0.0)) throw Error("covering_sum needs positive lengths");
    s += std::pow(l, alpha);
  }
  return s;
}

double partition_sum(const DyadicMeasure& mu, int n, double beta) {
  if (n > mu.resolution) throw Error("partition level exceeds measure resolution");
  if (!(beta >= 0.0)) throw Error("partition_sum needs beta >= 0");
  const DyadicMeasure coarse = coarsen(mu, n);
  const double root_n = std::sqrt(static_cast<double>(n));
  // Kahan compensation: 2^19 terms at n = 20 would otherwise drift past 1e-12
  double s = 0.0, comp = 0.0;
  for (std::size_t j = 0; j < coarse.masses.size(); j += 2) {
    const double term = std::pow(root_n * coarse.masses[j], beta) - comp;
    const double next = s + term;
    comp = (next - s) - term;
    s = next;
  }
  return s;
}

LaplaceMomentResult moment_via_laplace(std::span<const double> samples, double q,
                                       const LaplaceMomentOptions& opts) {
  if (!(q > 0.0) || !(q < 1.0)) throw Error("laplace moment needs q in (0,1)");
  if (samples.empty()) throw InsufficientDataError("laplace moment needs samples");
  double s_max = 0.0, s_min_pos = 0.0, mean = 0.0;
  std::size_t positives = 0;
  for (double s : samples) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw Error("laplace moment needs nonnegative samples");
    s_max = std::max(s_max, s);
    if (s > 0.0) {
      s_min_pos = positives == 0 ? s : std::min(s_min_pos, s);
      ++positives;
    }
    mean += s;
  }
  const double m_count = static_cast<double>(samples.size());
  mean /= m_count;
  LaplaceMomentResult r;
  if (positives == 0) return r;  // point mass at zero: moment 0
  const double frac_pos = static_cast<double>(positives) / m_count;

  double lo = opts.lambda_min, hi = opts.lambda_max;
  if (opts.adaptive_range) {
    lo = std::min(lo, 1e-3 / s_max);
    hi = std::max(hi, 40.0 / s_min_pos);
  }
  const double u_lo = std::log(lo), u_hi = std::log(hi);
  const double decades = (u_hi - u_lo) / std::log(10.0);
  const int points = std::max(64, static_cast<int>(std::ceil(decades * opts.points_per_decade))) + 1;
  const double du = (u_hi - u_lo) / (points - 1);

  // trapezoid in u = log lambda of e^{-q u} (1 - L(e^u))
  double integral = 0.0;
  for (int i = 0; i < points; ++i) {
    const double u = u_lo + i * du;
    const double lambda = std::exp(u);
    double one_minus_l = 0.0;
    for (double s : samples) one_minus_l -= std::expm1(-lambda * s);
    one_minus_l /= m_count;
    const double g = std::exp(-q * u) * one_minus_l;
    integral += (i == 0 || i == points - 1) ? 0.5 * g : g;
  }
  integral *= du;

  const double constant = q / std::tgamma(1.0 - q);
  // below lambda_min: 1 - L ~ lambda * mean; above lambda_max: 1 - L ~ frac_pos
  r.head_correction = constant * mean * std::pow(lo, 1.0 - q) / (1.0 - q);
  r.tail_correction = constant * frac_pos * std::pow(hi, -q) / q;
  r.value = constant * integral + r.head_correction + r.tail_correction;
  r.lambda_min = lo;
  r.lambda_max = hi;
  r.points = points;
  if (!std::isfinite(r.value))
    throw Error("laplace moment quadrature did not converge");
  return r;
}

// Fast path when the breakpoints are exactly the uniform grid of some
// resolution r >= n.
std::vector<double> evaluate_on_dyadic_points(const MonotoneMap& m, int n) {
  const std::size_t count = (std::size_t{1} << n) + 1;
  std::vector<double> out(count);
  const std::size_t nx = m.x.size();
  int r = 0;
  bool uniform = nx >= 3 && std::has_single_bit(nx - 1);
  if (uniform) {
    r = std::countr_zero(nx - 1);
    uniform = r >= n;
    const double cell = std::ldexp(1.0, -r);
    for (std::size_t j = 0; j < nx && uniform; ++j)
      uniform = m.x[j] == static_cast<double>(j) * cell;
  }
  if (uniform) {
    const std::size_t stride = std::size_t{1} << (r - n);
    for (std::size_t k = 0; k < count; ++k) out[k] = m.y[k * stride];
  } else {
    const double cell = std::ldexp(1.0, -n);
    for (std::size_t k = 0; k < count; ++k) out[k] = evaluate(m, static_cast<double>(k) * cell);
  }
  return out;
}

namespace {

struct TrendFit {
  double per_level = std::numeric_limits<double>::quiet_NaN();
  bool valid = false;
};

TrendFit fit_trend(std::span<const int> scales, std::span<const double> sums) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < sums.size(); ++i) {
    if (sums[i] > 0.0) {
      xs.push_back(static_cast<double>(scales[i]));
      ys.push_back(std::log(sums[i]));
    }
  }
  TrendFit t;
  if (xs.size() >= 3) {
    t.per_level = lsq_slope(xs, ys);
    t.valid = true;
  }
  return t;
}

}  // namespace

std::vector<double> dyadic_image_lengths(const MonotoneMap& m, int n) {
  const std::vector<double> v = evaluate_on_dyadic_points(m, n);
  std::vector<double> len(v.size() - 1);
  for (std::size_t j = 0; j + 1 < v.size(); ++j) len[j] = v[j + 1] - v[j];
  return len;
}

std::vector<double> local_exponents(const MonotoneMap& m, int n) {
  std::vector<double> len = dyadic_image_lengths(m, n);
  const double denom = -static_cast<double>(n) * kLn2;  // log(2^-n)
  for (double& l : len) l = std::log(l) / denom;
  return len;
}

std::string to_string(SpectrumSide s) {
  switch (s) {
    case SpectrumSide::kAtLeast: return "at-least";
    case SpectrumSide::kAtMost: return "at-most";
    case SpectrumSide::kEqual: return "equal";
  }
  return "?";
}

SpectrumSide spectrum_side_from_string(const std::string& s) {
  if (s == "at-least") return SpectrumSide::kAtLeast;
  if (s == "at-most") return SpectrumSide::kAtMost;
  if (s == "equal") return SpectrumSide::kEqual;
  throw Error("unknown spectrum side: " + s);
}

SpectrumAccumulator::SpectrumAccumulator(std::vector<double> deltas, SpectrumSide side, int n_max,
                                         double bandwidth)
    : deltas_(std::move(deltas)), side_(side), n_max_(n_max), bandwidth_(bandwidth) {
  if (n_max_ < 2) throw Error("spectrum needs n_max >= 2");
  if (!(bandwidth_ > 0.0)) throw Error("spectrum needs bandwidth > 0");
  for (double d : deltas_)
    if (!(d > 0.0) || !(d < 4.0)) throw Error("spectrum deltas must lie in (0,4)");
  for (int n = n_max_ / 2; n <= n_max_; ++n) scales_.push_back(n);
  counts_.assign(deltas_.size(), std::vector<double>(scales_.size(), 0.0));
}

void SpectrumAccumulator::add(const MonotoneMap& m) {
  for (std::size_t si = 0; si < scales_.size(); ++si) {
    const std::vector<double> expo = local_exponents(m, scales_[si]);
    for (std::size_t di = 0; di < deltas_.size(); ++di) {
      const double d = deltas_[di];
      std::size_t c = 0;
      switch (side_) {
        case SpectrumSide::kEqual:
          for (double e : expo) c += std::fabs(e - d) <= bandwidth_;
          break;
        case SpectrumSide::kAtLeast:
          for (double e : expo) c += e >= d;
          break;
        case SpectrumSide::kAtMost:
          for (double e : expo) c += e <= d;
          break;
      }
      counts_[di][si] += static_cast<double>(c);
    }
  }
  ++replicas_;
}

SpectrumEstimate SpectrumAccumulator::estimate() const {
  if (replicas_ == 0) throw InsufficientDataError("spectrum estimate with no replicas");
  SpectrumEstimate est;
  est.deltas = deltas_;
  est.side = side_;
  est.n_max = n_max_;
  est.bandwidth = bandwidth_;
  est.replicas = replicas_;
  est.scales = scales_;
  for (std::size_t di = 0; di < deltas_.size(); ++di) {
    std::vector<double> mean(scales_.size());
    for (std::size_t si = 0; si < scales_.size(); ++si)
      mean[si] = counts_[di][si] / static_cast<double>(replicas_);
    est.mean_counts.push_back(mean);
    std::vector<double> xs, ys;
    for (std::size_t si = 0; si < scales_.size(); ++si) {
      if (mean[si] > 0.0) {
        xs.push_back(static_cast<double>(scales_[si]));
        ys.push_back(std::log2(mean[si]));
      }
    }
    if (xs.empty()) {
      est.dimensions.push_back(0.0);
      est.empty.push_back(true);
    } else if (xs.size() < 3) {
      throw InsufficientDataError("spectrum estimate: fewer than 3 scales with nonempty counts");
    } else {
      est.dimensions.push_back(lsq_slope(xs, ys));
      est.empty.push_back(false);
    }
  }
  return est;
}

SpectrumEstimate spectrum_estimate(const MonotoneMap& m, std::vector<double> deltas,
                                   SpectrumSide side, int n_max, double bandwidth) {
  SpectrumAccumulator acc(std::move(deltas), side, n_max, bandwidth);
  acc.add(m);
  return acc.estimate();
}

CoveringReport image_covering_report(const MonotoneMap& h_plus,
                                     std::span<const IntervalSelection> selections, double alpha) {
  CoveringReport rep;
  rep.alpha = alpha;
  int prev = 0;
  for (const auto& sel : selections) {
    if (sel.resolution <= prev) throw Error("selections must come at strictly increasing scales");
    prev = sel.resolution;
    const std::vector<double> len = dyadic_image_lengths(h_plus, sel.resolution);
    double s = 0.0;
    for (std::uint32_t j : sel.selected) s += std::pow(len[j], alpha);
    rep.scales.push_back(sel.resolution);
    rep.sums.push_back(s);
  }
  const TrendFit t = fit_trend(rep.scales, rep.sums);
  rep.slope_per_level = t.per_level;
  rep.slope_log_scale = -t.per_level / kLn2;
  rep.slope_valid = t.valid;
  return rep;
}

CoveringReport intersection_covering_report(const MonotoneMap& h_plus, const MonotoneMap& h,
                                            double k, double eta, double alpha,
                                            std::span<const int> scales) {
  if (!(k > 0.5)) throw Error("intersection report needs k > 1/2");
  if (!(eta > 0.0)) throw Error("intersection report needs eta > 0");
  CoveringReport rep;
  rep.alpha = alpha;
  const GaugeFunction fk{GaugeFunction::Kind::kLogPower, k, 1.0};
  for (int n : scales) {
    const double threshold = gauge_eval(fk, std::ldexp(1.0, -n));
    const std::vector<double> len_p = dyadic_image_lengths(h_plus, n);
    const std::vector<double> len_h = dyadic_image_lengths(h, n);
    double s = 0.0;
    for (std::size_t j = 0; j < len_p.size(); ++j) {
      if (len_p[j] > threshold && len_h[j] >= std::pow(len_p[j], 0.5 + eta))
        s += std::pow(len_p[j], alpha);
    }
    rep.scales.push_back(n);
    rep.sums.push_back(s);
  }
  const TrendFit t = fit_trend(rep.scales, rep.sums);
  rep.slope_per_level = t.per_level;
  rep.slope_log_scale = -t.per_level / kLn2;
  rep.slope_valid = t.valid;
  return rep;
}

}  // namespace gmclab
