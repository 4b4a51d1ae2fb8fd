#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "gmclab/capacity.hpp"
#include "gmclab/chaos.hpp"
#include "gmclab/fractal.hpp"
#include "gmclab/lab.hpp"
#include "gmclab/logfield.hpp"
#include "gmclab/stats.hpp"
#include "gmclab/welding.hpp"

namespace py = pybind11;
using namespace gmclab;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

GaugeFunction make_gauge(const std::string& kind, double exponent, double scale) {
  GaugeFunction g;
  if (kind == "log-power") {
    g.kind = GaugeFunction::Kind::kLogPower;
  } else if (kind == "power") {
    g.kind = GaugeFunction::Kind::kPower;
  } else {
    throw Error("gauge kind must be 'log-power' or 'power'");
  }
  g.exponent = exponent;
  g.scale = scale;
  return g;
}

IntervalSelection make_selection(int resolution, const std::vector<std::uint32_t>& idx) {
  IntervalSelection s;
  s.resolution = resolution;
  s.selected = idx;
  return s;
}

}  // namespace

PYBIND11_MODULE(_gmclab, m) {
  m.doc() = "Gaussian multiplicative chaos and random welding laboratory";
  m.attr("__version__") = kVersion;

  // ---- field ----
  m.def(
      "regularized_covariance",
      [](double x, double y, int eps_log2) {
        return regularized_covariance(x, y, ScaleParameter(eps_log2));
      },
      py::arg("x"), py::arg("y"), py::arg("m"),
      "Covariance of the regularized field; eps = 2^-m.");
  m.def(
      "sample_field",
      [](int n, int eps_log2, std::uint64_t seed, const std::string& method) {
        const FieldSample f = sample_field(DyadicGrid(n), ScaleParameter(eps_log2), seed,
                                           sampling_method_from_string(method));
        py::dict meta;
        meta["n"] = f.grid.resolution;
        meta["m"] = f.epsilon.log2_inv;
        meta["seed"] = f.seed;
        meta["method"] = to_string(f.method);
        meta["clip_magnitude"] = f.clip_magnitude;
        meta["jitter"] = f.jitter;
        return py::make_tuple(to_array(f.values), meta);
      },
      py::arg("n"), py::arg("m"), py::arg("seed"), py::arg("method") = "auto",
      "Sample the field on the dyadic grid; returns (values, metadata).");
  m.def("sample_coarse_gaussian", &sample_coarse_gaussian, py::arg("interval_length"),
        py::arg("seed"), "One draw of N(0, 2 log(1/|I|)).");

  // ---- measures ----
  py::class_<DyadicMeasure>(m, "DyadicMeasure")
      .def_readonly("resolution", &DyadicMeasure::resolution)
      .def_readonly("total", &DyadicMeasure::total)
      .def_property_readonly("masses",
                             [](const DyadicMeasure& mu) { return to_array(mu.masses); })
      .def("__len__", [](const DyadicMeasure& mu) { return mu.masses.size(); })
      .def("__repr__", [](const DyadicMeasure& mu) {
        return "<DyadicMeasure n=" + std::to_string(mu.resolution) +
               " total=" + std::to_string(mu.total) + ">";
      });
  m.def(
      "build_measure",
      [](double gamma, int n, int eps_log2, std::uint64_t seed, const std::string& normalization,
         const std::string& method) {
        const FieldSample f = sample_field(DyadicGrid(n), ScaleParameter(eps_log2), seed,
                                           sampling_method_from_string(method));
        const auto norm = normalization == "probability" ? Normalization::kProbability
                                                         : Normalization::kRaw;
        return build_measure(f, GmcParameters{gamma, ScaleParameter(eps_log2), norm});
      },
      py::arg("gamma"), py::arg("n"), py::arg("m"), py::arg("seed"),
      py::arg("normalization") = "raw", py::arg("method") = "auto",
      "Sample a field and build the chaos measure on the dyadic grid.");
  m.def("lebesgue", &lebesgue, py::arg("n"));
  m.def(
      "measure_from_masses",
      [](int n, const std::vector<double>& masses) {
        return measure_from_masses(n, masses, "python");
      },
      py::arg("n"), py::arg("masses"));
  m.def("coarsen", &coarsen, py::arg("measure"), py::arg("n_target"));
  m.def(
      "interval_mass",
      [](const DyadicMeasure& mu, int level, std::uint64_t index) {
        return interval_mass(mu, DyadicInterval(level, index));
      },
      py::arg("measure"), py::arg("level"), py::arg("index"));

  // ---- welding ----
  py::class_<MonotoneMap>(m, "MonotoneMap")
      .def_property_readonly("breakpoints", [](const MonotoneMap& h) { return to_array(h.x); })
      .def_property_readonly("values", [](const MonotoneMap& h) { return to_array(h.y); })
      .def("__call__", [](const MonotoneMap& h, double t) { return evaluate(h, t); })
      .def("__repr__", [](const MonotoneMap& h) {
        return "<MonotoneMap " + std::to_string(h.x.size()) + " breakpoints>";
      });
  m.def("cdf", &cdf, py::arg("measure"));
  m.def("invert", &invert, py::arg("map"));
  m.def("compose", &compose, py::arg("outer"), py::arg("inner"));
  m.def("evaluate", &evaluate, py::arg("map"), py::arg("t"));
  m.def("image_length", &image_length, py::arg("map"), py::arg("a"), py::arg("b"));
  m.def("identity_map", &identity_map);

  // ---- fractal ----
  m.def(
      "gauge_eval",
      [](const std::string& kind, double exponent, double scale, double u) {
        return gauge_eval(make_gauge(kind, exponent, scale), u);
      },
      py::arg("kind"), py::arg("exponent"), py::arg("scale"), py::arg("u"));
  m.def(
      "exceptional_intervals",
      [](const DyadicMeasure& mu, const std::string& kind, double exponent, double scale, int n) {
        return exceptional_intervals(mu, make_gauge(kind, exponent, scale), n).selected;
      },
      py::arg("measure"), py::arg("kind"), py::arg("exponent"), py::arg("scale"), py::arg("n"),
      "Indices of level-n cells with mass >= gauge(2^-n).");
  m.def(
      "covering_sum",
      [](const std::vector<double>& lengths, double alpha) { return covering_sum(lengths, alpha); },
      py::arg("lengths"), py::arg("alpha"));
  m.def("partition_sum", &partition_sum, py::arg("measure"), py::arg("n"), py::arg("beta"));
  m.def(
      "moment_via_laplace",
      [](const std::vector<double>& samples, double q) {
        const LaplaceMomentResult r = moment_via_laplace(samples, q);
        py::dict d;
        d["value"] = r.value;
        d["head_correction"] = r.head_correction;
        d["tail_correction"] = r.tail_correction;
        d["lambda_min"] = r.lambda_min;
        d["lambda_max"] = r.lambda_max;
        d["points"] = r.points;
        return d;
      },
      py::arg("samples"), py::arg("q"));
  m.def(
      "local_exponents",
      [](const MonotoneMap& h, int n) { return to_array(local_exponents(h, n)); },
      py::arg("map"), py::arg("n"));
  m.def(
      "spectrum_estimate",
      [](const MonotoneMap& h, const std::vector<double>& deltas, const std::string& side,
         int n_max, double bandwidth) {
        const SpectrumEstimate est =
            spectrum_estimate(h, deltas, spectrum_side_from_string(side), n_max, bandwidth);
        py::dict d;
        d["deltas"] = est.deltas;
        d["dimensions"] = est.dimensions;
        d["empty"] = est.empty;
        d["scales"] = est.scales;
        d["mean_counts"] = est.mean_counts;
        return d;
      },
      py::arg("map"), py::arg("deltas"), py::arg("side") = "equal", py::arg("n_max") = 16,
      py::arg("bandwidth") = 0.1);

  // ---- capacity ----
  m.def(
      "log_energy", [](const DyadicMeasure& mu) { return log_energy(mu).value; },
      py::arg("measure"), "Double integral of log(2/|x-y|), uniform-in-cell model.");
  m.def(
      "riesz_energy",
      [](const DyadicMeasure& mu, double s) { return riesz_energy(mu, s).value; },
      py::arg("measure"), py::arg("s"));
  m.def("pullback", &pullback, py::arg("nu"), py::arg("map"), py::arg("n_out"));
  m.def(
      "equilibrium_measure",
      [](int resolution, const std::vector<std::uint32_t>& selected) {
        const EquilibriumResult eq = equilibrium_measure(make_selection(resolution, selected));
        py::dict d;
        d["measure"] = eq.measure;
        d["energy"] = eq.energy.value;
        d["iterations"] = eq.iterations;
        d["optimality_gap"] = eq.optimality_gap;
        d["converged"] = eq.converged;
        d["descent_ok"] = eq.descent_ok;
        return d;
      },
      py::arg("resolution"), py::arg("selected"));
  m.def(
      "polarity_score",
      [](const std::vector<std::pair<int, std::vector<std::uint32_t>>>& supports) {
        std::vector<IntervalSelection> sels;
        sels.reserve(supports.size());
        for (const auto& [res, idx] : supports) sels.push_back(make_selection(res, idx));
        const PolarityReport rep = polarity_score(sels);
        py::dict d;
        d["resolutions"] = rep.resolutions;
        d["energies"] = rep.energies;
        d["growth_rate"] = rep.growth_rate;
        return d;
      },
      py::arg("supports"));

  // ---- stats / lab ----
  m.def(
      "hill_tail_index",
      [](const std::vector<double>& samples, double top_fraction) {
        const HillEstimate e = hill_tail_index(samples, top_fraction);
        return py::make_tuple(e.index, e.se, e.k_used);
      },
      py::arg("samples"), py::arg("top_fraction"));
  m.def(
      "ks_two_sample",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        const KsResult r = ks_two_sample(a, b);
        return py::make_tuple(r.statistic, r.p_value);
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "run_suite",
      [](const std::string& config_json) {
        const ExperimentConfig cfg = config_from_json(nlohmann::json::parse(config_json));
        return suite_result_to_json(run_suite(cfg)).dump();
      },
      py::arg("config_json"), "Run a verification suite from a JSON config string.");
  m.def(
      "default_config",
      [](const std::string& suite) { return config_to_json(default_config(suite)).dump(); },
      py::arg("suite"));
  m.def("suite_names", [] { return suite_names(); });
}
