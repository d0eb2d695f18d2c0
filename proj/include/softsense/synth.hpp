#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "softsense/report.hpp"
#include "softsense/tables.hpp"

namespace softsense {

// Synthetic plant generator. Sensor signals are per-day constant levels plus
// Gaussian minute noise; the lab curve is a fixed smooth nonlinear map of the
// backward 1-hour sensor averages. Artifacts (nulls, duplicates, lab
// exceedances, sensor spikes, long unstable periods) are injected on top and
// logged in GroundTruth.
struct SynthSpec {
  std::int64_t n_days = 5690;
  int day_minutes = 120;  // compressed plant day; >= 1
  int sensors = 8;        // 5..8 built-in channels
  double null_rate = 0.7273;          // share of raw lab rows with missing cells
  double dup_rate = 0.0575;           // share of raw lab rows that are duplicates
  double lab_outlier_rate = 0.07;     // share of clean lab rows planted as exceedances
  double short_outlier_rate = 0.0327; // mean per-minute sensor spike probability
  // 1-based inclusive day ranges of long-term unstable periods.
  std::vector<std::pair<std::int64_t, std::int64_t>> long_periods = {{1, 13}, {789, 790}};
  std::uint64_t seed = 42;

  void validate() const;

  // Counts derived from the rates (rounded to nearest).
  std::int64_t dup_count() const;
  std::int64_t total_rows() const { return n_days + dup_count(); }
  std::int64_t null_count() const;
  std::int64_t lab_outlier_count() const;
};

struct GroundTruth {
  std::vector<std::int64_t> null_ts;  // lab rows with blanked cells
  std::vector<std::int64_t> dup_ts;   // timestamps that received a duplicate copy
  std::vector<std::pair<std::int64_t, int>> lab_outliers;  // (timestamp, point index)
  std::vector<std::string> sensor_names;
  std::vector<std::vector<std::int64_t>> spike_ts;  // per sensor, ascending
  std::vector<std::pair<std::int64_t, std::int64_t>> period_ts;  // inclusive [start,end]
  std::vector<std::string> importance_order;  // designated lab-map drivers, strongest first
  std::int64_t total_spikes = 0;
};

struct SynthResult {
  SensorTable sensors;
  LabTable lab;
  GroundTruth truth;
};

SynthResult generate_synthetic(const SynthSpec& spec);

Json ground_truth_to_json(const GroundTruth& truth);
GroundTruth ground_truth_from_json(const Json& j);

}  // namespace softsense
