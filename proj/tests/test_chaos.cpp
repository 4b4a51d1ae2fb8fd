#include <doctest.h>

#include <cmath>

#include "gmclab/chaos.hpp"
#include "gmclab/numeric.hpp"
#include "gmclab/rng.hpp"

using namespace gmclab;

TEST_CASE("gamma = 0 gives lebesgue") {
  const FieldSample f = sample_field(DyadicGrid(6), ScaleParameter(6), 77);
  const GmcParameters p{0.0, ScaleParameter(6), Normalization::kRaw};
  for (double w : density_weights(f, p)) CHECK(w == 1.0);
  const DyadicMeasure mu = build_measure(f, p);
  for (double m : mu.masses) CHECK(m == std::ldexp(1.0, -6));
  CHECK(mu.total == 1.0);
}

TEST_CASE("single-weight mean: one for subcritical, sqrt(log 1/eps) for critical") {
  const DyadicGrid grid(1);
  const ScaleParameter sp(6);
  FieldSampler sampler(grid, sp, {SamplingMethod::kDense, 1e-8, 1e-10});
  const std::size_t reps = 100000;
  std::vector<double> sub(reps), crit(reps);
  const GmcParameters ps{1.0, sp, Normalization::kRaw};
  const GmcParameters pc{2.0, sp, Normalization::kRaw};
  for (std::size_t r = 0; r < reps; ++r) {
    const FieldSample f = sampler.sample(derive_seed(21, 1, r));
    sub[r] = density_weights(f, ps)[0];
    crit[r] = density_weights(f, pc)[0];
  }
  const MeanSe ms = mean_se(sub);
  CHECK(std::fabs(ms.mean - 1.0) <= 3.0 * ms.se);
  const MeanSe mc = mean_se(crit);
  const double pref = std::sqrt(sp.log_inv());
  CHECK(std::fabs(mc.mean - pref) <= 3.0 * mc.se);
}

TEST_CASE("preconditions and errors") {
  const FieldSample f = sample_field(DyadicGrid(8), ScaleParameter(6), 1);
  // grid finer than the regularization scale
  CHECK_THROWS_AS(build_measure(f, GmcParameters{1.0, ScaleParameter(6), Normalization::kRaw}),
                  ResolutionMismatchError);
  // critical needs eps < 1
  const FieldSample g = sample_field(DyadicGrid(4), ScaleParameter(0), 1);
  CHECK_THROWS_AS(density_weights(g, GmcParameters{2.0, ScaleParameter(0), Normalization::kRaw}),
                  InvalidScaleError);
  // epsilon mismatch between field and parameters
  CHECK_THROWS_AS(density_weights(f, GmcParameters{1.0, ScaleParameter(7), Normalization::kRaw}),
                  ResolutionMismatchError);
  // underflowed weights are surfaced, not renormalized
  FieldSample dead = g;
  for (double& v : dead.values) v = -800.0;
  CHECK_THROWS_AS(build_measure(dead, GmcParameters{2.0, ScaleParameter(4), Normalization::kRaw}),
                  Error);
}

TEST_CASE("probability normalization") {
  const FieldSample f = sample_field(DyadicGrid(8), ScaleParameter(8), 5);
  const DyadicMeasure mu =
      build_measure(f, GmcParameters{1.5, ScaleParameter(8), Normalization::kProbability});
  CHECK(std::fabs(mu.total - 1.0) <= 1e-12);
}

TEST_CASE("coarsen conserves mass bit-exactly") {
  const FieldSample f = sample_field(DyadicGrid(10), ScaleParameter(10), 9);
  const DyadicMeasure mu =
      build_measure(f, GmcParameters{2.0, ScaleParameter(10), Normalization::kRaw});
  SUBCASE("identity") {
    const DyadicMeasure same = coarsen(mu, 10);
    CHECK(same.masses == mu.masses);
  }
  SUBCASE("uniform sums") {
    const DyadicMeasure leb = coarsen(lebesgue(10), 3);
    for (double m : leb.masses) CHECK(m == 0.125);
  }
  SUBCASE("conservation and block structure") {
    for (int target : {7, 4, 1}) {
      const DyadicMeasure c = coarsen(mu, target);
      CHECK(c.total == mu.total);  // same reduction tree, bit-exact
      for (std::uint64_t j = 0; j < c.masses.size(); ++j)
        CHECK(c.masses[j] == interval_mass(mu, DyadicInterval(target, j)));
    }
  }
  SUBCASE("target above resolution") { CHECK_THROWS_AS(coarsen(mu, 11), Error); }
}

TEST_CASE("interval mass") {
  const DyadicMeasure leb = lebesgue(10);
  CHECK(interval_mass(leb, DyadicInterval(0, 0)) == leb.total);
  CHECK(interval_mass(leb, DyadicInterval(3, 0)) == 0.125);
  // additivity on sibling blocks is exact by the pairwise tree
  const FieldSample f = sample_field(DyadicGrid(9), ScaleParameter(9), 31);
  const DyadicMeasure mu =
      build_measure(f, GmcParameters{2.0, ScaleParameter(9), Normalization::kRaw});
  for (int lvl = 1; lvl <= 9; ++lvl) {
    const DyadicInterval parent(lvl - 1, 0);
    CHECK(interval_mass(mu, parent) ==
          interval_mass(mu, DyadicInterval(lvl, 0)) + interval_mass(mu, DyadicInterval(lvl, 1)));
  }
  CHECK_THROWS_AS(interval_mass(mu, DyadicInterval(10, 0)), Error);
  CHECK_THROWS_AS(DyadicInterval(3, 8), Error);
}

TEST_CASE("subcritical martingale smoke") {
  const DyadicGrid grid(6);
  const ScaleParameter sp(6);
  FieldSampler sampler(grid, sp, {SamplingMethod::kDense, 1e-8, 1e-10});
  const std::size_t reps = 20000;
  std::vector<double> totals(reps);
  const GmcParameters p{1.0, sp, Normalization::kRaw};
  for (std::size_t r = 0; r < reps; ++r)
    totals[r] = build_measure(sampler.sample(derive_seed(77, 2, r)), p).total;
  const MeanSe ms = mean_se(totals);
  CHECK(std::fabs(ms.mean - 1.0) <= 4.0 * ms.se);
}
