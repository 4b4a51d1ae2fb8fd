#include <doctest.h>

#include <cmath>
#include <vector>

#include "gmclab/rng.hpp"
#include "gmclab/stats.hpp"

using namespace gmclab;

TEST_CASE("hill estimator on synthetic pareto") {
  CounterRng rng(42, 3, 0);
  std::vector<double> p1(10000), p2(10000);
  for (double& v : p1) v = 1.0 / rng.uniform();
  for (double& v : p2) v = 1.0 / std::sqrt(rng.uniform());
  const HillEstimate e1 = hill_tail_index(p1, 0.05);
  CHECK(e1.index >= 0.9);
  CHECK(e1.index <= 1.1);
  CHECK(e1.k_used == 500);
  const HillEstimate e2 = hill_tail_index(p2, 0.05);
  CHECK(e2.index >= 1.8);
  CHECK(e2.index <= 2.2);
}

TEST_CASE("hill estimator errors") {
  std::vector<double> constant(10000, 3.0);
  CHECK_THROWS_AS(hill_tail_index(constant, 0.05), Error);
  std::vector<double> few(200, 1.0);
  CHECK_THROWS_AS(hill_tail_index(few, 0.05), InsufficientDataError);  // 10 exceedances
}

TEST_CASE("two-sample ks") {
  CounterRng rng(7, 7, 7);
  std::vector<double> a(1000), b(1000), c(1000);
  for (double& v : a) v = rng.normal();
  for (double& v : b) v = rng.normal() + 5.0;
  for (double& v : c) v = rng.normal();
  SUBCASE("identical samples") {
    const KsResult r = ks_two_sample(a, a);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == 1.0);
  }
  SUBCASE("separated laws") { CHECK(ks_two_sample(a, b).p_value < 1e-6); }
  SUBCASE("same law") { CHECK(ks_two_sample(a, c).p_value > 0.01); }
  SUBCASE("level calibration: false rejections are rare") {
    int ok = 0;
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<double> x(1000), y(1000);
      for (double& v : x) v = rng.normal();
      for (double& v : y) v = rng.normal();
      ok += ks_two_sample(x, y).p_value > 0.01 ? 1 : 0;
    }
    CHECK(ok >= 98);
  }
  SUBCASE("size precondition") {
    std::vector<double> tiny(10, 0.0);
    CHECK_THROWS_AS(ks_two_sample(tiny, a), InsufficientDataError);
  }
}

TEST_CASE("one-sample ks against the normal") {
  CounterRng rng(11, 2, 0);
  std::vector<double> x(5000);
  for (double& v : x) v = 2.0 * rng.normal();
  CHECK(ks_one_sample_normal(x, 0.0, 4.0).p_value > 0.01);
  CHECK(ks_one_sample_normal(x, 0.0, 1.0).p_value < 1e-6);
}
