#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "gmclab/rng.hpp"
#include "gmclab/welding.hpp"

using namespace gmclab;

namespace {
DyadicMeasure two_cell(double a, double b) {
  return measure_from_masses(1, {a, b}, "two-cell");
}
}  // namespace

TEST_CASE("cdf basics") {
  const MonotoneMap id = cdf(lebesgue(4));
  for (std::size_t i = 0; i < id.x.size(); ++i) CHECK(id.y[i] == doctest::Approx(id.x[i]).epsilon(1e-15));
  const MonotoneMap m = cdf(two_cell(0.75, 0.25));
  CHECK(evaluate(m, 0.5) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(evaluate(m, 1.0) == 1.0);
  CHECK(evaluate(m, 0.0) == 0.0);
  CHECK_THROWS_AS(cdf(two_cell(1.0, 0.0)), DegenerateMapError);
}

TEST_CASE("invert") {
  const MonotoneMap m = cdf(two_cell(0.75, 0.25));
  const MonotoneMap mi = invert(m);
  // h(x) = 1.5 x on [0, 0.5]; h^-1(0.6) = 0.4
  CHECK(evaluate(mi, 0.6) == doctest::Approx(0.4).epsilon(1e-14));
  const MonotoneMap mii = invert(mi);
  CHECK(mii.x == m.x);
  CHECK(mii.y == m.y);
  // round trip at off-breakpoint points
  CounterRng rng(5, 1, 0);
  for (int i = 0; i < 100; ++i) {
    const double t = rng.uniform();
    CHECK(evaluate(mi, evaluate(m, t)) == doctest::Approx(t).epsilon(1e-12));
  }
  MonotoneMap bad{{0.0, 0.5, 1.0}, {0.0, 0.0, 1.0}};
  CHECK_THROWS_AS(invert(bad), DegenerateMapError);
}

TEST_CASE("compose") {
  const MonotoneMap id = identity_map();
  const MonotoneMap m = cdf(two_cell(0.3, 0.7));
  const MonotoneMap c = compose(id, m);
  for (std::size_t i = 0; i < m.x.size(); ++i) CHECK(c.y[i] == m.y[i]);

  // h+ = h- gives the identity welding
  const MonotoneMap h = compose(invert(m), m);
  for (std::size_t i = 0; i < h.x.size(); ++i)
    CHECK(h.y[i] == doctest::Approx(h.x[i]).epsilon(1e-12));

  // associativity with cancellation
  const MonotoneMap hp = cdf(two_cell(0.6, 0.4));
  const MonotoneMap lhs = compose(m, compose(invert(m), hp));
  for (std::size_t i = 0; i < lhs.x.size(); ++i)
    CHECK(lhs.y[i] == doctest::Approx(hp.y[i]).epsilon(1e-10));
}

TEST_CASE("image length") {
  const MonotoneMap id = identity_map();
  CHECK(image_length(id, 0.2, 0.5) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(image_length(id, 0.0, 1.0) == 1.0);
  const MonotoneMap m = cdf(two_cell(0.75, 0.25));
  CHECK(image_length(m, 0.1, 0.4) + image_length(m, 0.4, 0.9) ==
        doctest::Approx(image_length(m, 0.1, 0.9)).epsilon(1e-15));
  CHECK_THROWS_AS(image_length(m, 0.5, 0.5), Error);
}

TEST_CASE("critical welding maps stay homeomorphisms") {
  const ScaleParameter sp(10);
  const FieldSample f = sample_field(DyadicGrid(10), sp, 2024);
  const DyadicMeasure mu = build_measure(f, GmcParameters{2.0, sp, Normalization::kProbability});
  const MonotoneMap h = cdf(mu);
  CHECK_NOTHROW(validate(h));
  CHECK_NOTHROW(validate(invert(h)));
}

TEST_CASE("csv round trip is lossless") {
  const ScaleParameter sp(6);
  const FieldSample f = sample_field(DyadicGrid(6), sp, 8);
  const MonotoneMap h = cdf(build_measure(f, GmcParameters{2.0, sp, Normalization::kRaw}));
  const std::string path = (std::filesystem::temp_directory_path() / "gmclab_map.csv").string();
  write_map_csv(h, path);
  const MonotoneMap g = read_map_csv(path);
  CHECK(g.x == h.x);
  CHECK(g.y == h.y);
  std::remove(path.c_str());
}
