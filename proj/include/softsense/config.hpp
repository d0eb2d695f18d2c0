#pragma once

#include <cstdint>
#include <string>

#include "softsense/align.hpp"
#include "softsense/mlp.hpp"
#include "softsense/sensor_prep.hpp"
#include "softsense/synth.hpp"

namespace softsense {

// Everything the pipeline stages need, with runnable defaults. The master
// seed feeds every stage; per-purpose streams are derived inside the modules.
struct PipelineConfig {
  std::uint64_t seed = 42;
  std::string out_dir = "out";

  SynthSpec synth;
  double lab_iqr_multiplier = 1.5;
  SensorCleanConfig sensors;
  AlignConfig align;
  int baseline_m = 7;  // seasonal period of the daily lab series
  TrainConfig train;
  int explain_background = 100;   // background rows drawn from the train split
  int explain_permutations = 0;   // 0 = exact enumeration
  int histogram_bins = 30;

  void validate() const;
};

// Flat "section.key = value" file; '#' starts a comment. Unknown or duplicate
// keys are rejected. Parsing starts from the defaults.
PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(const std::string& text);

// Sets the master seed and pushes it into every stage.
void set_master_seed(PipelineConfig& cfg, std::uint64_t seed);

// Canonical listing of every key (sorted) with effective values.
std::string config_to_string(const PipelineConfig& cfg);

// FNV-1a of the canonical listing, as a fixed-width hex string.
std::string config_hash(const PipelineConfig& cfg);

}  // namespace softsense
