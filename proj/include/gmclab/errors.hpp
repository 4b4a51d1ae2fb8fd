#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gmclab {

/// Base class for all gmclab errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Scale parameter outside its admissible range.
struct InvalidScaleError : Error {
  using Error::Error;
};

/// Dense storage or factorization requested beyond the supported resolution.
struct CapacityLimitError : Error {
  using Error::Error;
};

/// Covariance factorization failed beyond the jitter tolerance.
struct FactorizationError : Error {
  FactorizationError(const std::string& msg, double min_eig)
      : Error(msg), min_eigenvalue(min_eig) {}
  double min_eigenvalue;
};

/// Circulant embedding clipped eigenvalues beyond the configured tolerance.
struct EmbeddingError : Error {
  EmbeddingError(const std::string& msg, double clip)
      : Error(msg), clip_magnitude(clip) {}
  double clip_magnitude;
};

/// Grid resolution incompatible with the regularization scale or measure.
struct ResolutionMismatchError : Error {
  using Error::Error;
};

/// Map is not strictly increasing (zero-mass cell or tied values).
struct DegenerateMapError : Error {
  using Error::Error;
};

/// Estimator received too few scales, samples or exceedances.
struct InsufficientDataError : Error {
  using Error::Error;
};

/// Iterative solver ran out of budget.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& msg, double grad)
      : Error(msg), gradient_norm(grad) {}
  double gradient_norm;
};

/// Bad experiment configuration; lists the offending fields.
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg, std::vector<std::string> f = {})
      : Error(msg), fields(std::move(f)) {}
  std::vector<std::string> fields;
};

}  // namespace gmclab
