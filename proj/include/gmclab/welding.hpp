#pragma once

#include <string>
#include <vector>

#include "gmclab/chaos.hpp"

namespace gmclab {

/// Strictly increasing piecewise-linear map [0,1] -> [0,1].
struct MonotoneMap {
  std::vector<double> x;  // breakpoints, strictly increasing, 0 .. 1
  std::vector<double> y;  // values, strictly increasing, 0 .. 1
};

/// Normalized cumulative mass function; breakpoints at cell endpoints.
/// Increments below one ulp of the running sum are floored to one ulp so the
/// stored map stays strictly increasing; true zero masses are an error.
MonotoneMap cdf(const DyadicMeasure& mu);

MonotoneMap invert(const MonotoneMap& m);

/// Piecewise-linear composition on the inner map's breakpoints.
MonotoneMap compose(const MonotoneMap& outer, const MonotoneMap& inner);

double evaluate(const MonotoneMap& m, double t);

/// map(b) - map(a), a < b.
double image_length(const MonotoneMap& m, double a, double b);

MonotoneMap identity_map();

/// Throws DegenerateMapError unless strictly increasing with endpoints 0 and 1.
void validate(const MonotoneMap& m);

/// CSV rows (breakpoint, value); lossless round trip.
void write_map_csv(const MonotoneMap& m, const std::string& path);
MonotoneMap read_map_csv(const std::string& path);

}  // namespace gmclab
