#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "gmclab/capacity.hpp"
#include "gmclab/rng.hpp"

using namespace gmclab;

namespace {

// Independent quadrature oracle: Int_[0,1]^2 f(|x-y|) = 2 Int_0^1 (1-u) f(u) du.
// Log kernel via u = e^-t (trapezoid on [0, 60]); the Riesz 1/2 kernel via
// u = t^2, which removes the singularity.
double oracle_log_energy_uniform() {
  const int n = 200000;
  const double h = 60.0 / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = i * h;
    const double g = (1.0 - std::exp(-t)) * t * std::exp(-t);
    acc += (i == 0 || i == n) ? 0.5 * g : g;
  }
  return std::log(2.0) + 2.0 * acc * h;
}

double oracle_riesz_half_uniform() {
  const int n = 200000;
  const double h = 1.0 / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = i * h;
    const double g = 2.0 * (1.0 - t * t);
    acc += (i == 0 || i == n) ? 0.5 * g : g;
  }
  return 2.0 * acc * h;
}

// Independent kernel-matrix entries from the plain double antiderivative
// F2(u) = (3/4) u^2 - (u^2/2) log u (the implementation uses a rearranged
// cancellation-free form).
Eigen::MatrixXd oracle_log_matrix(int resolution) {
  const auto n = static_cast<Eigen::Index>(std::size_t{1} << resolution);
  const double ell = std::ldexp(1.0, -resolution);
  const auto f2 = [](double u) {
    return u > 0.0 ? 0.75 * u * u - 0.5 * u * u * std::log(u) : 0.0;
  };
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = static_cast<double>(std::abs(i - j));
      if (i == j) {
        k(i, j) = std::log(2.0) + 1.5 + std::log(1.0 / ell);
      } else {
        const double second = f2((d + 1.0) * ell) - 2.0 * f2(d * ell) + f2((d - 1.0) * ell);
        k(i, j) = std::log(2.0) + second / (ell * ell);
      }
    }
  }
  return k;
}

IntervalSelection full_selection(int resolution) {
  IntervalSelection s;
  s.resolution = resolution;
  for (std::uint32_t j = 0; j < (1u << resolution); ++j) s.selected.push_back(j);
  return s;
}

// quarter-Cantor selection: keep the first and last quarter, depth times
IntervalSelection cantor_selection(int depth) {
  IntervalSelection s;
  s.resolution = 2 * depth;
  std::vector<std::uint32_t> idx = {0};
  for (int d = 0; d < depth; ++d) {
    std::vector<std::uint32_t> next;
    for (std::uint32_t j : idx) {
      next.push_back(4 * j);
      next.push_back(4 * j + 3);
    }
    idx = std::move(next);
  }
  s.selected = idx;
  return s;
}

}  // namespace

TEST_CASE("uniform energies match the quadrature oracle and closed forms") {
  const double oracle_log = oracle_log_energy_uniform();
  CHECK(oracle_log == doctest::Approx(std::log(2.0) + 1.5).epsilon(1e-6));
  const double oracle_riesz = oracle_riesz_half_uniform();
  CHECK(oracle_riesz == doctest::Approx(8.0 / 3.0).epsilon(1e-6));

  for (int n : {6, 8, 10}) {
    const EnergyReport e = log_energy(lebesgue(n));
    CHECK(std::fabs(e.value - (std::log(2.0) + 1.5)) <= 1e-12);
    const EnergyReport r = riesz_energy(lebesgue(n), 0.5);
    CHECK(std::fabs(r.value - 8.0 / 3.0) <= 1e-10);
  }
}

TEST_CASE("energy entries agree with the independent matrix") {
  const int n = 8;
  const Eigen::MatrixXd k = oracle_log_matrix(n);
  const auto cells = std::size_t{1} << n;
  // random probability measure
  CounterRng rng(55, 1, 0);
  std::vector<double> masses(cells);
  double tot = 0.0;
  for (double& m : masses) {
    m = rng.uniform();
    tot += m;
  }
  for (double& m : masses) m /= tot;
  const DyadicMeasure mu = measure_from_masses(n, masses, "random");
  Eigen::VectorXd v(static_cast<Eigen::Index>(cells));
  for (std::size_t i = 0; i < cells; ++i) v[static_cast<Eigen::Index>(i)] = mu.masses[i];
  const double direct = v.dot(k * v);
  CHECK(log_energy(mu).value == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("energy edge cases") {
  // all mass in one cell: the diagonal closed form
  const int n = 8;
  std::vector<double> masses(std::size_t{1} << n, 0.0);
  masses[37] = 1.0;
  const DyadicMeasure atom = measure_from_masses(n, masses, "atom");
  const double ell = std::ldexp(1.0, -n);
  CHECK(log_energy(atom).value ==
        doctest::Approx(std::log(2.0 / ell) + 1.5).epsilon(1e-13));
  CHECK(riesz_energy(atom, 0.5).value ==
        doctest::Approx(std::pow(ell, -0.5) * 8.0 / 3.0).epsilon(1e-13));

  // reflection invariance
  CounterRng rng(91, 2, 0);
  std::vector<double> m2(std::size_t{1} << n);
  double tot = 0.0;
  for (double& v : m2) {
    v = rng.uniform();
    tot += v;
  }
  for (double& v : m2) v /= tot;
  std::vector<double> m2r(m2.rbegin(), m2.rend());
  CHECK(log_energy(measure_from_masses(n, m2, "a")).value ==
        doctest::Approx(log_energy(measure_from_masses(n, m2r, "b")).value).epsilon(1e-12));

  // riesz limits and errors
  CHECK(riesz_energy(lebesgue(6), 1e-6).value == doctest::Approx(1.0).epsilon(1e-4));
  CHECK_THROWS_AS(riesz_energy(lebesgue(6), 1.0), Error);
  CHECK_THROWS_AS(log_energy(measure_from_masses(2, {1.0, 1.0, 1.0, 1.0}, "raw")), Error);
}

TEST_CASE("pullback") {
  const ScaleParameter sp(8);
  const DyadicMeasure mu = build_measure(sample_field(DyadicGrid(8), sp, 3),
                                         GmcParameters{2.0, sp, Normalization::kProbability});
  const MonotoneMap h = cdf(mu);
  SUBCASE("identity map returns the same measure") {
    const DyadicMeasure pb = pullback(mu, identity_map(), 8);
    for (std::size_t j = 0; j < pb.masses.size(); ++j)
      CHECK(pb.masses[j] == doctest::Approx(mu.masses[j]).epsilon(1e-12));
  }
  SUBCASE("pullback of lebesgue under h has cdf h") {
    const DyadicMeasure pb = pullback(lebesgue(8), h, 8);
    CHECK(std::fabs(pb.total - 1.0) <= 1e-12);
    double cum = 0.0;
    const double cell = std::ldexp(1.0, -8);
    for (std::size_t j = 0; j < pb.masses.size(); ++j) {
      cum += pb.masses[j];
      CHECK(cum == doctest::Approx(evaluate(h, (j + 1) * cell)).epsilon(1e-10));
    }
  }
  SUBCASE("pullback under the inverse has cdf h^-1") {
    const DyadicMeasure pb = pullback(lebesgue(8), invert(h), 8);
    double cum = 0.0;
    const double cell = std::ldexp(1.0, -8);
    for (std::size_t j = 0; j < pb.masses.size(); ++j) {
      cum += pb.masses[j];
      CHECK(cum == doctest::Approx(evaluate(invert(h), (j + 1) * cell)).epsilon(1e-10));
    }
  }
  SUBCASE("raw measures are rejected") {
    const DyadicMeasure raw = build_measure(sample_field(DyadicGrid(8), sp, 4),
                                            GmcParameters{2.0, sp, Normalization::kRaw});
    CHECK_THROWS_AS(pullback(raw, h, 8), Error);
  }
}

TEST_CASE("equilibrium measure against the linear-solve oracle") {
  for (int n : {6, 8}) {
    const Eigen::MatrixXd k = oracle_log_matrix(n);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(k.rows());
    const Eigen::VectorXd x = k.llt().solve(ones);
    const double oracle_energy = 1.0 / x.sum();
    // the full-interval equality-constrained optimum is interior, so it is
    // also the simplex optimum
    CHECK(x.minCoeff() > 0.0);

    const EquilibriumResult eq = equilibrium_measure(full_selection(n));
    CHECK(eq.converged);
    CHECK(eq.descent_ok);
    CHECK(eq.optimality_gap <= 1e-4);
    CHECK(std::fabs(eq.energy.value - oracle_energy) <= 2e-4);
    // below the uniform energy, concentrated at the endpoints
    CHECK(eq.energy.value < log_energy(lebesgue(n)).value);
    CHECK(eq.measure.masses.front() > eq.measure.masses[std::size_t{1} << (n - 1)]);
  }
}

TEST_CASE("equilibrium on a single cell is the one feasible point") {
  IntervalSelection one;
  one.resolution = 8;
  one.selected = {100};
  const EquilibriumResult eq = equilibrium_measure(one);
  CHECK(eq.converged);
  const double ell = std::ldexp(1.0, -8);
  CHECK(eq.energy.value == doctest::Approx(std::log(2.0 / ell) + 1.5).epsilon(1e-13));
  CHECK_THROWS_AS(equilibrium_measure(IntervalSelection{}), Error);
}

TEST_CASE("polarity score") {
  SUBCASE("full interval plateaus near log 8") {
    std::vector<IntervalSelection> sels = {full_selection(6), full_selection(7),
                                           full_selection(8)};
    const PolarityReport rep = polarity_score(sels);
    for (double e : rep.energies) CHECK(std::fabs(e - std::log(8.0)) < 0.02);
    CHECK(std::fabs(rep.growth_rate) <= 0.01);
  }
  SUBCASE("a single shrinking cell diverges at rate log 2") {
    std::vector<IntervalSelection> sels;
    for (int n : {6, 7, 8}) {
      IntervalSelection s;
      s.resolution = n;
      s.selected = {0};
      sels.push_back(s);
    }
    const PolarityReport rep = polarity_score(sels);
    CHECK(rep.growth_rate == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  }
  SUBCASE("quarter-cantor selection plateaus (positive capacity)") {
    std::vector<IntervalSelection> sels = {cantor_selection(1), cantor_selection(2),
                                           cantor_selection(3)};
    const PolarityReport rep = polarity_score(sels);
    CHECK(rep.growth_rate < 0.25);
    for (double e : rep.energies) CHECK(e < 4.0);
  }
  SUBCASE("needs at least three resolutions") {
    std::vector<IntervalSelection> sels = {full_selection(6), full_selection(7)};
    CHECK_THROWS_AS(polarity_score(sels), InsufficientDataError);
  }
}
