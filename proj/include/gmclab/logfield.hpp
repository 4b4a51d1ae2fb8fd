#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "gmclab/grid.hpp"

namespace gmclab {

enum class SamplingMethod { kAuto, kDense, kCirculant };

std::string to_string(SamplingMethod m);
SamplingMethod sampling_method_from_string(const std::string& s);

/// E[X_eps(x) X_eps(y)] on [0,1]^2:
///   2 log(1/|x-y|)                  for eps <= |x-y| <= 1
///   2 (log(1/eps) + 1 - |x-y|/eps)  for |x-y| < eps
double regularized_covariance(double x, double y, ScaleParameter eps);

/// Same kernel as a function of the distance d = |x-y|, raw eps.
double kernel_value(double d, double eps);

/// Dense kernel matrix on grid midpoints.  Limited to n <= 12.
Eigen::MatrixXd build_covariance(const DyadicGrid& grid, ScaleParameter eps);

struct FieldSample {
  DyadicGrid grid;
  ScaleParameter epsilon;
  std::vector<double> values;
  std::uint64_t seed = 0;
  SamplingMethod method = SamplingMethod::kDense;
  double clip_magnitude = 0.0;  // largest clipped negative embedding eigenvalue
  double jitter = 0.0;          // diagonal jitter applied before factorization
};

struct SamplerOptions {
  SamplingMethod method = SamplingMethod::kAuto;
  double clip_tolerance = 1e-8;  // relative to the largest embedding eigenvalue
  double jitter = 1e-10;         // relative diagonal jitter, dense fallback
};

/// Reusable sampler.  The factorization (dense) or embedding spectrum
/// (circulant) is computed once and shared read-only across replicas;
/// sample() is const and safe to call concurrently.
class FieldSampler {
 public:
  FieldSampler(DyadicGrid grid, ScaleParameter eps, SamplerOptions opts = {});

  FieldSample sample(std::uint64_t seed) const;

  SamplingMethod method() const { return method_; }
  double clip_magnitude() const { return clip_; }
  double jitter() const { return jitter_; }

 private:
  DyadicGrid grid_;
  ScaleParameter eps_;
  SamplingMethod method_;
  double clip_ = 0.0;
  double jitter_ = 0.0;
  Eigen::MatrixXd chol_;              // dense path: lower Cholesky factor
  std::vector<double> sqrt_lambda_;   // circulant path: sqrt(lambda_l / M)
};

/// One-shot sample; regeneration from (grid, eps, seed, method) is bit-identical.
FieldSample sample_field(const DyadicGrid& grid, ScaleParameter eps, std::uint64_t seed,
                         SamplingMethod method = SamplingMethod::kAuto);

/// One draw of the coarse variable X_I ~ N(0, 2 log(1/|I|)), 0 < |I| < 1.
double sample_coarse_gaussian(double interval_length, std::uint64_t seed);

/// Little-endian binary dump: header (n, m, seed, method, clip_magnitude) as
/// 64-bit fields, then 2^n doubles.
void write_field(const FieldSample& f, const std::string& path);
FieldSample read_field(const std::string& path);

}  // namespace gmclab
