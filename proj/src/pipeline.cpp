#include "softsense/pipeline.hpp"

#include <filesystem>
#include <iostream>

#include "softsense/csv.hpp"
#include "softsense/evalreport.hpp"
#include "softsense/lab_prep.hpp"
#include "softsense/mlp.hpp"
#include "softsense/report.hpp"
#include "softsense/rng.hpp"
#include "softsense/sarima.hpp"
#include "softsense/sensor_prep.hpp"
#include "softsense/shap.hpp"
#include "softsense/synth.hpp"

namespace softsense {
namespace {

std::string point_name(int k) { return "p" + std::to_string(kLabPoints[static_cast<std::size_t>(k)]); }

void note(const std::string& path) { std::cout << "wrote " << path << "\n"; }

StagePaths prepare(const PipelineConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);
  return StagePaths::in(cfg.out_dir);
}

}  // namespace

StagePaths StagePaths::in(const std::string& out_dir) {
  StagePaths p;
  const std::string base = out_dir + "/";
  p.raw_lab = base + "raw_lab.csv";
  p.raw_sensors = base + "raw_sensors.csv";
  p.truth = base + "truth.json";
  p.lab_clean = base + "lab_clean.csv";
  p.lab_report = base + "lab_report.json";
  p.sensors_clean = base + "sensors_clean.csv";
  p.sensor_report = base + "sensor_report.json";
  p.aligned = base + "aligned.bin";
  p.thresholds = base + "thresholds.json";
  p.model = base + "model.bundle";
  p.shap = base + "shap.csv";
  p.report = base + "report.json";
  p.histogram = base + "error_histogram.csv";
  return p;
}

void run_synth(const PipelineConfig& cfg) {
  const StagePaths p = prepare(cfg);
  const SynthResult result = generate_synthetic(cfg.synth);
  write_lab_csv(result.lab, p.raw_lab);
  note(p.raw_lab);
  write_sensor_csv(result.sensors, p.raw_sensors);
  note(p.raw_sensors);
  write_json(ground_truth_to_json(result.truth), p.truth);
  note(p.truth);
}

void run_prep_lab(const PipelineConfig& cfg) {
  const StagePaths p = prepare(cfg);
  const LabTable raw = parse_lab_csv(p.raw_lab);
  const LabCleanResult result = clean_lab(raw, cfg.lab_iqr_multiplier);
  write_lab_csv(result.lab, p.lab_clean);
  note(p.lab_clean);
  write_json(clean_report_to_json(result.report), p.lab_report);
  note(p.lab_report);
}

void run_prep_sensors(const PipelineConfig& cfg) {
  const StagePaths p = prepare(cfg);
  const SensorTable raw = parse_sensor_csv(p.raw_sensors);
  const SensorCleanResult result = clean_sensors(raw, cfg.sensors);
  write_sensor_csv(result.sensors, p.sensors_clean);
  note(p.sensors_clean);
  write_json(clean_report_to_json(result.report), p.sensor_report);
  note(p.sensor_report);
}

void run_align(const PipelineConfig& cfg) {
  const StagePaths p = prepare(cfg);
  const LabTable lab = parse_lab_csv(p.lab_clean);
  const SensorTable sensors = parse_sensor_csv(p.sensors_clean);
  const CleanReport sensor_report = clean_report_from_json(read_json(p.sensor_report));
  const LabTable masked = mask_lab_in_periods(lab, sensor_report.long_term_periods).first;
  const AlignedDataset data =
      align_dataset(sensors, masked, cfg.align, sensor_report.long_term_periods);
  save_aligned(data, p.aligned);
  note(p.aligned);
}

void run_baseline(const PipelineConfig& cfg) {
  const StagePaths p = prepare(cfg);
  const AlignedDataset data = load_aligned(p.aligned);
  const BaselineThresholds thresholds = baseline_thresholds(data.Y, cfg.baseline_m);
  Json j;
  j["seasonal_period"] = cfg.baseline_m;
  for (int k = 0; k < kNumLabPoints; ++k) {
    const auto& order = thresholds.orders[static_cast<std::size_t>(k)];
    j["thresholds"][point_name(k)] = thresholds.mae[static_cast<std::size_t>(k)];
    j["orders"][point_name(k)] = {order.p, order.d, order.q, order.P, order.D, order.Q};
  }
  write_json(j, p.thresholds);
  note(p.thresholds);
}

void run_train(const PipelineConfig& cfg) {
  const StagePaths p = prepare(cfg);
  const AlignedDataset data = load_aligned(p.aligned);
  const TrainResult result = train_mlp(data, cfg.train);
  ModelBundle bundle;
  bundle.net = result.net;
  bundle.x_scaler = data.x_scaler;
  bundle.y_scaler = data.y_scaler;
  bundle.feature_names = data.feature_names;
  bundle.seed = cfg.seed;
  bundle.best_epoch = static_cast<std::uint32_t>(result.best_epoch);
  bundle.best_test_mae = result.best_test_mae;
  save_bundle(bundle, p.model);
  note(p.model);
}

void run_explain(const PipelineConfig& cfg) {
  const StagePaths p = prepare(cfg);
  const AlignedDataset data = load_aligned(p.aligned);
  const ModelBundle bundle = load_bundle(p.model);
  if (bundle.feature_names != data.feature_names) {
    throw InputError("explain: model bundle and aligned dataset disagree on features");
  }
  const ModelFn model = [&](const Eigen::MatrixXd& x) { return predict_celsius(bundle, x); };
  const Eigen::MatrixXd background = sample_background(
      data.X, data.train_idx, cfg.explain_background, cfg.seed ^ fnv1a64("shap.background"));
  const Eigen::MatrixXd instances = select_rows(data.X, data.test_idx);
  const ShapSummary summary =
      explain_instances(model, instances, background, data.feature_names,
                        cfg.explain_permutations, cfg.seed ^ fnv1a64("shap.permutations"));
  write_shap_csv(summary, p.shap);
  note(p.shap);
}

void run_evaluate(const PipelineConfig& cfg) {
  const StagePaths p = prepare(cfg);
  const AlignedDataset data = load_aligned(p.aligned);
  const ModelBundle bundle = load_bundle(p.model);
  const Json thresholds_json = read_json(p.thresholds);
  std::array<double, kNumLabPoints> thresholds{};
  try {
    for (int k = 0; k < kNumLabPoints; ++k) {
      thresholds[static_cast<std::size_t>(k)] =
          thresholds_json.at("thresholds").at(point_name(k)).get<double>();
    }
  } catch (const Json::exception&) {
    throw InputError(p.thresholds + ": malformed thresholds file");
  }

  const Eigen::MatrixXd pred_train =
      predict_celsius(bundle, select_rows(data.X, data.train_idx));
  const Eigen::MatrixXd pred_test = predict_celsius(bundle, select_rows(data.X, data.test_idx));
  const Eigen::MatrixXd y_train = select_rows(data.Y, data.train_idx);
  const Eigen::MatrixXd y_test = select_rows(data.Y, data.test_idx);
  const Eigen::VectorXd mae_train = mae_per_point(pred_train, y_train);
  const Eigen::VectorXd mae_test = mae_per_point(pred_test, y_test);
  const ThresholdCheck check = threshold_check(mae_test, thresholds);
  const Eigen::MatrixXd errors = pred_test - y_test;
  const CiAnalysis ci = ci_analysis(errors);
  const std::vector<double> pooled(errors.data(), errors.data() + errors.size());
  const Histogram hist = histogram(pooled, cfg.histogram_bins);
  write_histogram_csv(hist, p.histogram);
  note(p.histogram);

  Json j;
  j["config_hash"] = config_hash(cfg);
  j["seed"] = cfg.seed;
  j["n_train"] = static_cast<std::int64_t>(data.train_idx.size());
  j["n_test"] = static_cast<std::int64_t>(data.test_idx.size());
  j["mae_train"]["avg"] = mae_train.mean();
  j["mae_test"]["avg"] = mae_test.mean();
  j["pass"] = check.all_pass;
  j["frac_outside"] = ci.frac_outside;
  j["ci"]["mean"] = ci.mean;
  j["ci"]["half_width"] = ci.half_width;
  j["ci"]["frac_outside"] = ci.frac_outside;
  for (int k = 0; k < kNumLabPoints; ++k) {
    const std::string name = point_name(k);
    j["mae_train"]["points"][name] = mae_train(k);
    j["mae_test"]["points"][name] = mae_test(k);
    j["thresholds"][name] = thresholds[static_cast<std::size_t>(k)];
    j["point_pass"][name] = static_cast<bool>(check.point_pass[static_cast<std::size_t>(k)]);
    j["ci"]["points"][name]["mean"] = ci.point_mean(k);
    j["ci"]["points"][name]["half_width"] = ci.point_half_width(k);
    j["ci"]["points"][name]["frac_outside"] = ci.point_frac_outside(k);
  }
  j["histogram"]["lo"] = hist.lo;
  j["histogram"]["hi"] = hist.hi;
  j["histogram"]["counts"] = hist.counts;
  write_json(j, p.report);
  note(p.report);
}

void run_all(const PipelineConfig& cfg) {
  run_synth(cfg);
  run_prep_lab(cfg);
  run_prep_sensors(cfg);
  run_align(cfg);
  run_baseline(cfg);
  run_train(cfg);
  run_explain(cfg);
  run_evaluate(cfg);
}

}  // namespace softsense
