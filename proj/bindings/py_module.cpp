#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <span>
#include <string>

#include "softsense/config.hpp"
#include "softsense/evalreport.hpp"
#include "softsense/mlp.hpp"
#include "softsense/pipeline.hpp"
#include "softsense/sarima.hpp"
#include "softsense/shap.hpp"
#include "softsense/tables.hpp"

namespace py = pybind11;

namespace {

using namespace softsense;

PipelineConfig make_config(const std::string& config, const py::object& seed,
                           const std::string& out) {
  PipelineConfig cfg;
  if (!config.empty()) cfg = load_config(config);
  if (!seed.is_none()) set_master_seed(cfg, seed.cast<std::uint64_t>());
  if (!out.empty()) cfg.out_dir = out;
  cfg.validate();
  return cfg;
}

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

PYBIND11_MODULE(_softsense, m) {
  m.doc() = "Batch soft-sensor toolkit (C++ core)";
  m.attr("__version__") = "0.1.0";

  py::register_exception<InputError>(m, "InputError");
  py::register_exception<FitError>(m, "FitError");

  m.def(
      "run",
      [](const std::string& stage, const std::string& config, const py::object& seed,
         const std::string& out) {
        static const std::map<std::string, void (*)(const PipelineConfig&)> stages = {
            {"synth", &run_synth},       {"prep-lab", &run_prep_lab},
            {"prep-sensors", &run_prep_sensors}, {"align", &run_align},
            {"baseline", &run_baseline}, {"train", &run_train},
            {"explain", &run_explain},   {"evaluate", &run_evaluate},
            {"all", &run_all},
        };
        const auto it = stages.find(stage);
        if (it == stages.end()) throw py::value_error("unknown stage: " + stage);
        it->second(make_config(config, seed, out));
      },
      py::arg("stage"), py::arg("config") = "", py::arg("seed") = py::none(),
      py::arg("out") = "",
      "Run one pipeline stage ('synth' ... 'evaluate', or 'all'), like the softsense CLI.");

  m.def(
      "config_hash",
      [](const std::string& path) { return config_hash(load_config(path)); }, py::arg("path"),
      "Canonical hash of a configuration file, as recorded in report.json.");

  m.def(
      "select_d", [](const Eigen::VectorXd& series) { return select_d(as_span(series)); },
      py::arg("series"), "Regular differencing order chosen by repeated ADF tests.");

  m.def(
      "select_D",
      [](const Eigen::VectorXd& series, int m_) { return select_D(as_span(series), m_); },
      py::arg("series"), py::arg("m"),
      "Seasonal differencing order chosen by the seasonal stability test.");

  m.def(
      "stepwise_search",
      [](const Eigen::VectorXd& series, int m_) {
        const SarimaFit fit = stepwise_search(as_span(series), m_);
        py::dict d;
        d["order"] = py::make_tuple(fit.order.p, fit.order.d, fit.order.q, fit.order.P,
                                    fit.order.D, fit.order.Q, fit.order.m);
        d["aic"] = fit.aic;
        d["intercept"] = fit.intercept;
        d["one_step_mae"] = one_step_forecast_mae(as_span(series), fit);
        return d;
      },
      py::arg("series"), py::arg("m"),
      "Stepwise AIC order search; returns order, aic, intercept and in-sample one-step MAE.");

  m.def(
      "baseline_thresholds",
      [](const Eigen::MatrixXd& y, int m_) {
        const BaselineThresholds t = baseline_thresholds(y, m_);
        Eigen::VectorXd out(kNumLabPoints);
        for (int k = 0; k < kNumLabPoints; ++k) out(k) = t.mae[static_cast<std::size_t>(k)];
        return out;
      },
      py::arg("y"), py::arg("m"),
      "Per-point SARIMA one-step MAE thresholds for a samples x 7 target matrix.");

  m.def(
      "predict",
      [](const std::string& model, const Eigen::MatrixXd& x) {
        return predict_celsius(load_bundle(model), x);
      },
      py::arg("model"), py::arg("x"),
      "Predict the 7 distillation points (degC) from raw feature rows with a saved bundle.");

  m.def(
      "shapley",
      [](const std::string& model, const Eigen::VectorXd& x, const Eigen::MatrixXd& background,
         int permutations, std::uint64_t seed) {
        const ModelBundle bundle = load_bundle(model);
        const ModelFn f = [&](const Eigen::MatrixXd& rows) {
          return predict_celsius(bundle, rows);
        };
        const ShapValues v = permutations > 0
                                 ? shapley_sampled(f, x, background, permutations, seed)
                                 : shapley_exact(f, x, background);
        py::dict d;
        d["phi"] = v.phi;
        d["base"] = v.base;
        d["fx"] = v.fx;
        return d;
      },
      py::arg("model"), py::arg("x"), py::arg("background"), py::arg("permutations") = 0,
      py::arg("seed") = 0,
      "Shapley attributions of one instance against a background sample; permutations=0 is "
      "exact enumeration.");

  m.def(
      "ci_analysis",
      [](const Eigen::MatrixXd& errors) {
        const CiAnalysis ci = ci_analysis(errors);
        py::dict d;
        d["mean"] = ci.mean;
        d["half_width"] = ci.half_width;
        d["frac_outside"] = ci.frac_outside;
        d["point_mean"] = ci.point_mean;
        d["point_half_width"] = ci.point_half_width;
        d["point_frac_outside"] = ci.point_frac_outside;
        return d;
      },
      py::arg("errors"),
      "95% interval statistics of an error matrix, pooled and per column.");
}
