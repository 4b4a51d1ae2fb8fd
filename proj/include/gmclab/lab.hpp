#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "gmclab/errors.hpp"

namespace gmclab {

inline constexpr const char* kVersion = "0.1.0";

/// Experiment configuration.  Every statistical threshold is a visible,
/// overridable field; defaults per suite come from default_config().
struct ExperimentConfig {
  std::string suite;
  double gamma = 2.0;
  int n = 12;  // grid resolution
  int m = 12;  // epsilon exponent, eps = 2^-m
  int replicas = 1000;
  std::uint64_t seed = 20250808ull;
  unsigned threads = 1;
  std::string out_dir;  // empty: no files written
  std::string format = "csv";
  std::string method = "auto";

  // estimator parameters
  double k = 1.0;
  double k_prime = 4.5;
  double eta = 0.05;
  std::vector<double> alphas{0.6, 0.3};
  double beta = 1.2;
  double q = 0.3;
  std::vector<double> deltas{0.5, 1.0, 1.5};
  double bandwidth = 0.1;
  std::string side = "equal";
  int n_max = 16;
  std::vector<int> scales;  // covering scales; default 4..n_max
  std::vector<int> drift_levels{8, 10, 12, 14};
  double top_fraction = 0.01;
  std::vector<double> gammas{0.5, 1.0, 1.5};
  std::vector<double> moment_ps{1.2, 2.5};

  // statistical thresholds
  double se_factor = 3.0;
  double p_threshold = 0.01;
  double trend_fraction = 0.8;
  double hill_low = 0.8, hill_high = 1.2;
  double spectrum_tol = 0.15;
  double holder_floor = 0.15;
  double identity_tol = 0.05;
  double drift_tol = 0.25;
  double moment_drift_stable = 0.10;
  double moment_drift_blowup = 0.50;
  double negative_moment_tol = 0.05;
  double energy_tol_log = 1e-6;
  double energy_tol_riesz = 1e-4;
  double energy_tol_equilibrium = 0.02;
  double stability_ratio = 2.0;
};

const std::vector<std::string>& suite_names();
ExperimentConfig default_config(const std::string& suite);
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const ExperimentConfig& c);

/// Config without execution-only fields (threads, out); what provenance
/// embeds and hashes, so results stay byte-identical across thread counts.
nlohmann::ordered_json canonical_config_json(const ExperimentConfig& c);

struct CriterionOutcome {
  std::string id;
  bool passed = false;
  bool advisory = false;
  std::string detail;
  nlohmann::ordered_json stats;
};

struct SuiteResult {
  std::string suite;
  bool passed = false;  // all non-advisory criteria passed
  std::vector<CriterionOutcome> criteria;
  nlohmann::ordered_json provenance;
};

nlohmann::ordered_json suite_result_to_json(const SuiteResult& r);

/// Run one verification suite.  Deterministic given (config, seed), including
/// across thread counts; writes <suite>.result.json plus CSV tables under
/// out_dir when set.  No wall-clock data enters the result.
SuiteResult run_suite(const ExperimentConfig& config);

/// FNV-1a hash used for config provenance and suite stream tags.
std::uint64_t fnv1a(const std::string& s);

}  // namespace gmclab
