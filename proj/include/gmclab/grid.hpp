#pragma once

#include <cmath>
#include <cstdint>

#include "gmclab/errors.hpp"

namespace gmclab {

/// Dyadic grid on [0,1]: 2^n cells of length 2^-n, field evaluated at cell
/// midpoints x_j = (j + 1/2) 2^-n (keeps |x_i - x_j| >= 2^-n off-diagonal).
struct DyadicGrid {
  int resolution;

  explicit DyadicGrid(int n) : resolution(n) {
    if (n < 1 || n > 26) throw Error("grid resolution must be in [1, 26]");
  }
  std::size_t size() const { return std::size_t{1} << resolution; }
  double cell_length() const { return std::ldexp(1.0, -resolution); }
  double midpoint(std::size_t j) const { return (static_cast<double>(j) + 0.5) * cell_length(); }
  double left(std::size_t j) const { return static_cast<double>(j) * cell_length(); }
  bool operator==(const DyadicGrid&) const = default;
};

/// Regularization scale eps = 2^-m, eps in (0, 1].
struct ScaleParameter {
  int log2_inv;  // m

  explicit ScaleParameter(int m) : log2_inv(m) {
    if (m < 0 || m > 60) throw InvalidScaleError("epsilon exponent must be in [0, 60]");
  }
  double epsilon() const { return std::ldexp(1.0, -log2_inv); }
  /// log(1/eps) = m log 2
  double log_inv() const { return static_cast<double>(log2_inv) * 0.6931471805599453; }
  /// E[X_eps(x)^2] = 2 (log(1/eps) + 1)
  double point_variance() const { return 2.0 * (log_inv() + 1.0); }
  bool operator==(const ScaleParameter&) const = default;
};

/// Dyadic interval [k 2^-level, (k+1) 2^-level).
struct DyadicInterval {
  int level;
  std::uint64_t index;

  DyadicInterval(int lvl, std::uint64_t k) : level(lvl), index(k) {
    if (lvl < 0 || lvl > 26 || k >= (std::uint64_t{1} << lvl))
      throw Error("invalid dyadic interval");
  }
  double length() const { return std::ldexp(1.0, -level); }
  double left() const { return static_cast<double>(index) * length(); }
  double right() const { return static_cast<double>(index + 1) * length(); }
};

}  // namespace gmclab
