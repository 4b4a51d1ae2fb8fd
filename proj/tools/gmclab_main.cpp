#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "gmclab/capacity.hpp"
#include "gmclab/chaos.hpp"
#include "gmclab/fractal.hpp"
#include "gmclab/lab.hpp"
#include "gmclab/logfield.hpp"
#include "gmclab/rng.hpp"
#include "gmclab/welding.hpp"

namespace fs = std::filesystem;
using gmclab::ExperimentConfig;

namespace {

std::string default_out_dir() {
  const char* env = std::getenv("GMCLAB_OUT_DIR");
  return env != nullptr && *env != '\0' ? env : ".";
}

int print_suite_result(const gmclab::SuiteResult& r) {
  for (const auto& c : r.criteria) {
    std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << r.suite << '/' << c.id
              << (c.advisory ? " (advisory)" : "") << ": " << c.detail << '\n';
  }
  std::cout << (r.passed ? "PASS" : "FAIL") << ' ' << r.suite << '\n';
  return r.passed ? 0 : 1;
}

ExperimentConfig load_config(const std::string& suite, const std::string& config_path) {
  if (config_path.empty()) return gmclab::default_config(suite);
  std::ifstream is(config_path);
  if (!is) throw gmclab::ConfigError("cannot open config file " + config_path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw gmclab::ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!suite.empty() && !j.contains("suite")) j["suite"] = suite;
  return gmclab::config_from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gmclab: gaussian multiplicative chaos and random welding laboratory"};
  app.require_subcommand(1);

  // ---- sample-field ----
  auto* sf = app.add_subcommand("sample-field", "sample the regularized log-correlated field");
  int sf_n = 8, sf_m = 8;
  std::uint64_t sf_seed = 1;
  std::string sf_method = "auto", sf_out = default_out_dir(), sf_format = "csv";
  sf->add_option("--n", sf_n, "grid resolution (2^n cells)");
  sf->add_option("--m", sf_m, "epsilon exponent, eps = 2^-m");
  sf->add_option("--seed", sf_seed, "seed");
  sf->add_option("--method", sf_method, "auto | dense-factorization | circulant-embedding");
  sf->add_option("--out", sf_out, "output directory");
  sf->add_option("--format", sf_format, "csv | json");

  // ---- build-measure ----
  auto* bm = app.add_subcommand("build-measure", "build a GMC measure from a fresh field sample");
  double bm_gamma = 2.0;
  int bm_n = 12, bm_m = 12;
  std::uint64_t bm_seed = 1;
  std::string bm_norm = "raw", bm_method = "auto", bm_out = default_out_dir(), bm_format = "csv";
  bm->add_option("--gamma", bm_gamma, "gamma in [0,2]; 2 = critical");
  bm->add_option("--n", bm_n, "grid resolution");
  bm->add_option("--m", bm_m, "epsilon exponent");
  bm->add_option("--seed", bm_seed, "seed");
  bm->add_option("--normalization", bm_norm, "raw | probability");
  bm->add_option("--method", bm_method, "sampling method");
  bm->add_option("--out", bm_out, "output directory");
  bm->add_option("--format", bm_format, "csv | json");

  // ---- welding ----
  auto* wd = app.add_subcommand("welding", "build h+, h-, h^-1 and h = h-^-1 o h+");
  double wd_gamma = 2.0;
  int wd_n = 14, wd_m = 14;
  std::uint64_t wd_seed = 1;
  std::string wd_out = default_out_dir();
  wd->add_option("--gamma", wd_gamma, "gamma in [0,2]");
  wd->add_option("--n", wd_n, "grid resolution");
  wd->add_option("--m", wd_m, "epsilon exponent");
  wd->add_option("--seed", wd_seed, "seed");
  wd->add_option("--out", wd_out, "output directory");

  // ---- suite-backed subcommands ----
  struct SuiteCmd {
    CLI::App* cmd = nullptr;
    std::string suite;
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    unsigned threads = 0;
    std::string format;
  };
  std::vector<SuiteCmd> suite_cmds;
  suite_cmds.reserve(8);  // callbacks capture element addresses
  const auto add_suite_cmd = [&](const std::string& name, const std::string& suite,
                                 const std::string& help) {
    suite_cmds.push_back({});
    SuiteCmd& sc = suite_cmds.back();
    sc.suite = suite;
    sc.cmd = app.add_subcommand(name, help);
    sc.cmd->add_option("--config", sc.config_path, "JSON config file (schema in README)");
    sc.cmd->add_option("--seed", sc.seed, "master seed")->each([&sc](const std::string&) {
      sc.seed_set = true;
    });
    sc.cmd->add_option("--out", sc.out, "output directory");
    sc.cmd->add_option("--threads", sc.threads, "worker threads");
    sc.cmd->add_option("--format", sc.format, "csv | json");
  };
  add_suite_cmd("spectrum", "spectrum", "multifractal spectrum estimate on critical welding maps");
  add_suite_cmd("covering", "covering", "image covering-sum trends over exceptional intervals");
  add_suite_cmd("capacity", "capacity", "energies, equilibrium measures and pullback stability");

  auto* vf = app.add_subcommand("verify", "run a verification suite");
  std::string vf_suite;
  SuiteCmd vc;
  vf->add_option("suite", vf_suite, "one of: field-covariance moments scale-invariance "
                                    "tail-index spectrum holder covering intersection "
                                    "laplace-moment capacity")
      ->required();
  vf->add_option("--config", vc.config_path, "JSON config file");
  vf->add_option("--seed", vc.seed, "master seed")->each([&vc](const std::string&) {
    vc.seed_set = true;
  });
  vf->add_option("--out", vc.out, "output directory");
  vf->add_option("--threads", vc.threads, "worker threads");
  vf->add_option("--format", vc.format, "csv | json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sf->parsed()) {
      const gmclab::FieldSample f =
          gmclab::sample_field(gmclab::DyadicGrid(sf_n), gmclab::ScaleParameter(sf_m), sf_seed,
                               gmclab::sampling_method_from_string(sf_method));
      fs::create_directories(sf_out);
      gmclab::write_field(f, (fs::path(sf_out) / "field.bin").string());
      nlohmann::ordered_json meta;
      meta["n"] = f.grid.resolution;
      meta["m"] = f.epsilon.log2_inv;
      meta["seed"] = f.seed;
      meta["method"] = gmclab::to_string(f.method);
      meta["clip_magnitude"] = f.clip_magnitude;
      meta["jitter"] = f.jitter;
      std::ofstream(fs::path(sf_out) / "field_meta.json") << meta.dump(1) << '\n';
      if (sf_format == "csv") {
        std::ofstream os(fs::path(sf_out) / "field.csv");
        os << "index,x,value\n";
        os.precision(17);
        for (std::size_t j = 0; j < f.values.size(); ++j)
          os << j << ',' << f.grid.midpoint(j) << ',' << f.values[j] << '\n';
      }
      std::cout << "wrote " << (fs::path(sf_out) / "field.bin").string() << " (" << f.values.size()
                << " values, method " << gmclab::to_string(f.method) << ")\n";
      return 0;
    }
    if (bm->parsed()) {
      const auto norm = bm_norm == "probability" ? gmclab::Normalization::kProbability
                                                 : gmclab::Normalization::kRaw;
      const gmclab::FieldSample f =
          gmclab::sample_field(gmclab::DyadicGrid(bm_n), gmclab::ScaleParameter(bm_m), bm_seed,
                               gmclab::sampling_method_from_string(bm_method));
      const gmclab::DyadicMeasure mu = gmclab::build_measure(
          f, gmclab::GmcParameters{bm_gamma, gmclab::ScaleParameter(bm_m), norm});
      fs::create_directories(bm_out);
      gmclab::write_measure_csv(mu, (fs::path(bm_out) / "measure.csv").string());
      gmclab::write_measure_meta(mu, (fs::path(bm_out) / "measure_meta.json").string());
      std::cout << "wrote " << (fs::path(bm_out) / "measure.csv").string() << " (total "
                << mu.total << ")\n";
      return 0;
    }
    if (wd->parsed()) {
      const gmclab::ScaleParameter sp(wd_m);
      const gmclab::DyadicGrid grid(wd_n);
      const gmclab::GmcParameters params{wd_gamma, sp, gmclab::Normalization::kProbability};
      const auto seed_p = gmclab::derive_seed(wd_seed, gmclab::tag::kField, 0);
      const auto seed_m = gmclab::derive_seed(wd_seed, gmclab::tag::kChaosMinus, 0);
      const gmclab::MonotoneMap h_plus =
          gmclab::cdf(gmclab::build_measure(gmclab::sample_field(grid, sp, seed_p), params));
      const gmclab::MonotoneMap h_minus =
          gmclab::cdf(gmclab::build_measure(gmclab::sample_field(grid, sp, seed_m), params));
      const gmclab::MonotoneMap h_minus_inv = gmclab::invert(h_minus);
      const gmclab::MonotoneMap h = gmclab::compose(h_minus_inv, h_plus);
      fs::create_directories(wd_out);
      gmclab::write_map_csv(h_plus, (fs::path(wd_out) / "h_plus.csv").string());
      gmclab::write_map_csv(h_minus, (fs::path(wd_out) / "h_minus.csv").string());
      gmclab::write_map_csv(h_minus_inv, (fs::path(wd_out) / "h_minus_inverse.csv").string());
      gmclab::write_map_csv(h, (fs::path(wd_out) / "h.csv").string());
      nlohmann::ordered_json meta;
      meta["gamma"] = wd_gamma;
      meta["n"] = wd_n;
      meta["m"] = wd_m;
      meta["seed"] = wd_seed;
      std::ofstream(fs::path(wd_out) / "welding_meta.json") << meta.dump(1) << '\n';
      std::cout << "wrote welding maps under " << wd_out << '\n';
      return 0;
    }
    const auto run_from = [&](const SuiteCmd& sc, const std::string& suite) -> int {
      ExperimentConfig cfg = load_config(suite, sc.config_path);
      if (sc.seed_set) cfg.seed = sc.seed;
      if (!sc.out.empty()) cfg.out_dir = sc.out;
      if (cfg.out_dir.empty()) cfg.out_dir = default_out_dir();
      if (sc.threads > 0) cfg.threads = sc.threads;
      if (!sc.format.empty()) cfg.format = sc.format;
      return print_suite_result(gmclab::run_suite(cfg));
    };
    for (const auto& sc : suite_cmds)
      if (sc.cmd->parsed()) return run_from(sc, sc.suite);
    if (vf->parsed()) return run_from(vc, vf_suite);
  } catch (const gmclab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const gmclab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
