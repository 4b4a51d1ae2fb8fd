#include "gmclab/lab.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

namespace gmclab {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "field-covariance", "moments",  "scale-invariance", "tail-index",    "spectrum",
      "holder",           "covering", "intersection",     "laplace-moment", "capacity"};
  return names;
}

ExperimentConfig default_config(const std::string& suite) {
  ExperimentConfig c;
  c.suite = suite;
  if (suite == "field-covariance") {
    c.n = 8;
    c.m = 8;
    c.replicas = 20000;
  } else if (suite == "moments") {
    c.n = 12;
    c.m = 12;
    c.replicas = 100000;
    c.method = "circulant-embedding";
    c.gamma = 1.5;
  } else if (suite == "scale-invariance") {
    c.n = 12;
    c.m = 12;
    c.replicas = 2000;
    c.gamma = 1.0;
    c.method = "circulant-embedding";
  } else if (suite == "tail-index") {
    c.n = 14;
    c.m = 14;
    c.replicas = 10000;
  } else if (suite == "spectrum") {
    c.n = 16;
    c.m = 16;
    c.replicas = 200;
  } else if (suite == "holder") {
    c.n = 16;
    c.m = 16;
    c.replicas = 50;
  } else if (suite == "covering") {
    c.n = 16;
    c.m = 16;
    c.replicas = 100;
  } else if (suite == "intersection") {
    c.n = 16;
    c.m = 16;
    c.replicas = 100;
    c.alphas = {0.2};
  } else if (suite == "laplace-moment") {
    c.n = 10;
    c.m = 10;
    c.replicas = 10000;
  } else if (suite == "capacity") {
    c.n = 10;
    c.m = 12;
    c.replicas = 50;
    c.k = 5.0;
  } else {
    throw ConfigError("unknown suite: " + suite, {"suite"});
  }
  if (c.scales.empty())
    for (int s = 4; s <= c.n_max; ++s) c.scales.push_back(s);
  return c;
}

namespace {

template <typename T>
void read_field_json(const nlohmann::json& j, const char* key, T& out,
                     std::vector<std::string>& bad) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    bad.push_back(key);
  }
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  std::vector<std::string> bad;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  std::string suite;
  read_field_json(j, "suite", suite, bad);
  if (suite.empty() ||
      std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
    bad.push_back("suite");
  ExperimentConfig c = bad.empty() ? default_config(suite) : ExperimentConfig{};
  c.suite = suite;

  read_field_json(j, "gamma", c.gamma, bad);
  read_field_json(j, "n", c.n, bad);
  read_field_json(j, "m", c.m, bad);
  read_field_json(j, "replicas", c.replicas, bad);
  read_field_json(j, "seed", c.seed, bad);
  read_field_json(j, "threads", c.threads, bad);
  read_field_json(j, "out", c.out_dir, bad);
  read_field_json(j, "format", c.format, bad);
  read_field_json(j, "method", c.method, bad);

  if (j.contains("params")) {
    const auto& p = j.at("params");
    if (!p.is_object()) {
      bad.push_back("params");
    } else {
      read_field_json(p, "k", c.k, bad);
      read_field_json(p, "k_prime", c.k_prime, bad);
      read_field_json(p, "eta", c.eta, bad);
      read_field_json(p, "alphas", c.alphas, bad);
      read_field_json(p, "beta", c.beta, bad);
      read_field_json(p, "q", c.q, bad);
      read_field_json(p, "deltas", c.deltas, bad);
      read_field_json(p, "bandwidth", c.bandwidth, bad);
      read_field_json(p, "side", c.side, bad);
      read_field_json(p, "n_max", c.n_max, bad);
      read_field_json(p, "scales", c.scales, bad);
      read_field_json(p, "drift_levels", c.drift_levels, bad);
      read_field_json(p, "top_fraction", c.top_fraction, bad);
      read_field_json(p, "gammas", c.gammas, bad);
      read_field_json(p, "moment_ps", c.moment_ps, bad);
    }
  }
  if (j.contains("thresholds")) {
    const auto& t = j.at("thresholds");
    if (!t.is_object()) {
      bad.push_back("thresholds");
    } else {
      read_field_json(t, "se_factor", c.se_factor, bad);
      read_field_json(t, "p_threshold", c.p_threshold, bad);
      read_field_json(t, "trend_fraction", c.trend_fraction, bad);
      read_field_json(t, "hill_low", c.hill_low, bad);
      read_field_json(t, "hill_high", c.hill_high, bad);
      read_field_json(t, "spectrum_tol", c.spectrum_tol, bad);
      read_field_json(t, "holder_floor", c.holder_floor, bad);
      read_field_json(t, "identity_tol", c.identity_tol, bad);
      read_field_json(t, "drift_tol", c.drift_tol, bad);
      read_field_json(t, "moment_drift_stable", c.moment_drift_stable, bad);
      read_field_json(t, "moment_drift_blowup", c.moment_drift_blowup, bad);
      read_field_json(t, "negative_moment_tol", c.negative_moment_tol, bad);
      read_field_json(t, "energy_tol_log", c.energy_tol_log, bad);
      read_field_json(t, "energy_tol_riesz", c.energy_tol_riesz, bad);
      read_field_json(t, "energy_tol_equilibrium", c.energy_tol_equilibrium, bad);
      read_field_json(t, "stability_ratio", c.stability_ratio, bad);
    }
  }

  // range checks
  if (c.gamma < 0.0 || c.gamma > 2.0) bad.push_back("gamma");
  if (c.n < 1 || c.n > 26) bad.push_back("n");
  if (c.m < 0 || c.m > 60) bad.push_back("m");
  if (c.replicas < 1) bad.push_back("replicas");
  if (c.threads < 1) bad.push_back("threads");
  if (c.format != "csv" && c.format != "json") bad.push_back("format");
  if (c.method != "auto" && c.method != "dense-factorization" && c.method != "dense" &&
      c.method != "circulant-embedding" && c.method != "circulant")
    bad.push_back("method");
  if (!(c.q > 0.0) || !(c.q < 1.0)) bad.push_back("params.q");
  if (!(c.bandwidth > 0.0)) bad.push_back("params.bandwidth");
  if (!(c.top_fraction > 0.0) || !(c.top_fraction < 1.0)) bad.push_back("params.top_fraction");
  if (!(c.trend_fraction > 0.0) || c.trend_fraction > 1.0) bad.push_back("thresholds.trend_fraction");
  for (std::size_t i = 1; i < c.scales.size(); ++i)
    if (c.scales[i] <= c.scales[i - 1]) {
      bad.push_back("params.scales");
      break;
    }
  if (!c.scales.empty() && (c.scales.front() < 1 || c.scales.back() > 26))
    bad.push_back("params.scales");

  if (!bad.empty()) {
    std::sort(bad.begin(), bad.end());
    bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
    std::string msg = "invalid configuration fields:";
    for (const auto& f : bad) msg += " " + f;
    throw ConfigError(msg, bad);
  }
  return c;
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["suite"] = c.suite;
  j["gamma"] = c.gamma;
  j["n"] = c.n;
  j["m"] = c.m;
  j["replicas"] = c.replicas;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["out"] = c.out_dir;
  j["format"] = c.format;
  j["method"] = c.method;
  nlohmann::ordered_json p;
  p["k"] = c.k;
  p["k_prime"] = c.k_prime;
  p["eta"] = c.eta;
  p["alphas"] = c.alphas;
  p["beta"] = c.beta;
  p["q"] = c.q;
  p["deltas"] = c.deltas;
  p["bandwidth"] = c.bandwidth;
  p["side"] = c.side;
  p["n_max"] = c.n_max;
  p["scales"] = c.scales;
  p["drift_levels"] = c.drift_levels;
  p["top_fraction"] = c.top_fraction;
  p["gammas"] = c.gammas;
  p["moment_ps"] = c.moment_ps;
  j["params"] = p;
  nlohmann::ordered_json t;
  t["se_factor"] = c.se_factor;
  t["p_threshold"] = c.p_threshold;
  t["trend_fraction"] = c.trend_fraction;
  t["hill_low"] = c.hill_low;
  t["hill_high"] = c.hill_high;
  t["spectrum_tol"] = c.spectrum_tol;
  t["holder_floor"] = c.holder_floor;
  t["identity_tol"] = c.identity_tol;
  t["drift_tol"] = c.drift_tol;
  t["moment_drift_stable"] = c.moment_drift_stable;
  t["moment_drift_blowup"] = c.moment_drift_blowup;
  t["negative_moment_tol"] = c.negative_moment_tol;
  t["energy_tol_log"] = c.energy_tol_log;
  t["energy_tol_riesz"] = c.energy_tol_riesz;
  t["energy_tol_equilibrium"] = c.energy_tol_equilibrium;
  t["stability_ratio"] = c.stability_ratio;
  j["thresholds"] = t;
  return j;
}

nlohmann::ordered_json canonical_config_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j = config_to_json(c);
  j.erase("threads");
  j.erase("out");
  return j;
}

nlohmann::ordered_json suite_result_to_json(const SuiteResult& r) {
  nlohmann::ordered_json j;
  j["suite"] = r.suite;
  j["passed"] = r.passed;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : r.criteria) {
    nlohmann::ordered_json cj;
    cj["id"] = c.id;
    cj["passed"] = c.passed;
    cj["advisory"] = c.advisory;
    cj["detail"] = c.detail;
    cj["stats"] = c.stats;
    arr.push_back(cj);
  }
  j["criteria"] = arr;
  j["provenance"] = r.provenance;
  return j;
}

}  // namespace gmclab
