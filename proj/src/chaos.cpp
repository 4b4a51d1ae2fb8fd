#include "gmclab/chaos.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

#include "gmclab/numeric.hpp"

namespace gmclab {

std::string to_string(Normalization n) {
  return n == Normalization::kRaw ? "raw" : "probability";
}

std::vector<double> density_weights(const FieldSample& field, const GmcParameters& params) {
  if (params.gamma < 0.0 || params.gamma > 2.0)
    throw Error("gamma must lie in [0, 2]");
  if (!(field.epsilon == params.epsilon))
    throw ResolutionMismatchError("field and parameters disagree on epsilon");
  const bool critical = params.gamma == 2.0;
  if (critical && params.epsilon.log2_inv == 0)
    throw InvalidScaleError("critical weights need eps < 1 (the sqrt(log 1/eps) prefactor vanishes)");

  const double sigma2 = params.epsilon.point_variance();
  std::vector<double> w(field.values.size());
  if (critical) {
    const double pref = std::sqrt(params.epsilon.log_inv());
    const double shift = 0.5 * sigma2;
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = pref * std::exp(field.values[j] - shift);
  } else {
    const double a = 0.5 * params.gamma;
    const double shift = params.gamma * params.gamma / 8.0 * sigma2;
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = std::exp(a * field.values[j] - shift);
  }
  return w;
}

DyadicMeasure build_measure(const FieldSample& field, const GmcParameters& params) {
  const int n = field.grid.resolution;
  if (n > params.epsilon.log2_inv)
    throw ResolutionMismatchError("grid finer than the regularization scale (2^-n < eps)");
  std::vector<double> masses = density_weights(field, params);
  const double cell = field.grid.cell_length();
  for (double& m : masses) m *= cell;

  DyadicMeasure mu;
  mu.resolution = n;
  mu.masses = std::move(masses);
  mu.total = pairwise_sum(mu.masses);
  if (!(mu.total > 0.0) || !std::isfinite(mu.total))
    throw Error("degenerate measure: total mass underflowed to zero or is not finite");
  if (params.normalization == Normalization::kProbability) {
    for (double& m : mu.masses) m /= mu.total;
    mu.total = pairwise_sum(mu.masses);
  }
  mu.provenance = {"gmc", field.seed, params.gamma, params.epsilon.log2_inv,
                   params.normalization};
  return mu;
}

DyadicMeasure coarsen(const DyadicMeasure& mu, int n_target) {
  if (n_target > mu.resolution)
    throw Error("coarsen target exceeds measure resolution");
  if (n_target == mu.resolution) return mu;
  const std::size_t block = std::size_t{1} << (mu.resolution - n_target);
  DyadicMeasure out;
  out.resolution = n_target;
  out.masses.resize(std::size_t{1} << n_target);
  const std::span<const double> src(mu.masses);
  for (std::size_t j = 0; j < out.masses.size(); ++j)
    out.masses[j] = pairwise_sum(src.subspan(j * block, block));
  out.total = pairwise_sum(out.masses);  // bit-equal to mu.total: same reduction tree
  out.provenance = mu.provenance;
  return out;
}

double interval_mass(const DyadicMeasure& mu, const DyadicInterval& iv) {
  if (iv.level > mu.resolution)
    throw Error("interval level exceeds measure resolution");
  const std::size_t block = std::size_t{1} << (mu.resolution - iv.level);
  return pairwise_sum(std::span<const double>(mu.masses).subspan(iv.index * block, block));
}

DyadicMeasure lebesgue(int n) {
  DyadicMeasure mu;
  mu.resolution = n;
  mu.masses.assign(std::size_t{1} << n, std::ldexp(1.0, -n));
  mu.total = pairwise_sum(mu.masses);
  mu.provenance.tag = "lebesgue";
  return mu;
}

DyadicMeasure measure_from_masses(int n, std::vector<double> masses, const std::string& tag) {
  if (masses.size() != (std::size_t{1} << n))
    throw Error("mass vector length must be 2^n");
  for (double m : masses)
    if (!(m >= 0.0) || !std::isfinite(m)) throw Error("masses must be finite and nonnegative");
  DyadicMeasure mu;
  mu.resolution = n;
  mu.masses = std::move(masses);
  mu.total = pairwise_sum(mu.masses);
  mu.provenance.tag = tag;
  return mu;
}

DyadicMeasure normalized(const DyadicMeasure& mu) {
  if (!(mu.total > 0.0)) throw Error("cannot normalize a zero measure");
  DyadicMeasure out = mu;
  for (double& m : out.masses) m /= mu.total;
  out.total = pairwise_sum(out.masses);
  out.provenance.normalization = Normalization::kProbability;
  return out;
}

void write_measure_csv(const DyadicMeasure& mu, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << "index,left_endpoint,mass\n";
  os.precision(17);
  const double cell = std::ldexp(1.0, -mu.resolution);
  for (std::size_t j = 0; j < mu.masses.size(); ++j)
    os << j << ',' << static_cast<double>(j) * cell << ',' << mu.masses[j] << '\n';
}

void write_measure_meta(const DyadicMeasure& mu, const std::string& path) {
  nlohmann::ordered_json j;
  j["gamma"] = mu.provenance.gamma;
  j["eps_log2"] = mu.provenance.eps_log2;
  j["resolution"] = mu.resolution;
  j["seed"] = mu.provenance.seed;
  j["normalization"] = to_string(mu.provenance.normalization);
  j["tag"] = mu.provenance.tag;
  j["total"] = mu.total;
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << j.dump(2) << '\n';
}

DyadicMeasure read_measure_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  std::string line;
  std::getline(is, line);  // header
  std::vector<double> masses;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw Error("malformed measure CSV line: " + line);
    masses.push_back(std::stod(line.substr(c2 + 1)));
  }
  int n = 0;
  while ((std::size_t{1} << n) < masses.size()) ++n;
  if ((std::size_t{1} << n) != masses.size())
    throw Error("measure CSV does not hold 2^n rows");
  return measure_from_masses(n, std::move(masses), "csv");
}

}  // namespace gmclab
