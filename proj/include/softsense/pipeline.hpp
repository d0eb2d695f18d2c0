#pragma once

#include <string>

#include "softsense/config.hpp"

namespace softsense {

// Fixed artifact names inside the output directory.
struct StagePaths {
  std::string raw_lab, raw_sensors, truth;
  std::string lab_clean, lab_report;
  std::string sensors_clean, sensor_report;
  std::string aligned;
  std::string thresholds;
  std::string model;
  std::string shap;
  std::string report, histogram;

  static StagePaths in(const std::string& out_dir);
};

void run_synth(const PipelineConfig& cfg);
void run_prep_lab(const PipelineConfig& cfg);
void run_prep_sensors(const PipelineConfig& cfg);
void run_align(const PipelineConfig& cfg);
void run_baseline(const PipelineConfig& cfg);
void run_train(const PipelineConfig& cfg);
void run_explain(const PipelineConfig& cfg);
void run_evaluate(const PipelineConfig& cfg);

// The stages above, in order; artifacts are identical to individual runs.
void run_all(const PipelineConfig& cfg);

}  // namespace softsense
