#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "softsense/tables.hpp"

namespace softsense {

struct Scaler {
  Eigen::VectorXd mean, std;  // population std per column
};

// Fit on the given rows only (population statistics); zero-variance columns
// are an error naming the column.
Scaler fit_scaler(const Eigen::MatrixXd& m, std::span<const Eigen::Index> fit_rows,
                  const std::vector<std::string>& names = {});
Eigen::MatrixXd apply_scaler(const Scaler& s, const Eigen::MatrixXd& m);
Eigen::MatrixXd invert_scaler(const Scaler& s, const Eigen::MatrixXd& m);

// Mean of valid sensor rows in the half-open window (lab_ts - width, lab_ts],
// skipping excluded rows. Returns nothing when the window is empty.
std::optional<Eigen::VectorXd> window_average(const SensorTable& sensors, std::int64_t lab_ts,
                                              std::int64_t width_seconds,
                                              const std::vector<char>& excluded = {});

// Seeded shuffle split: |train| = floor(frac * n); both halves ascending.
std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> split_train_test(
    Eigen::Index n, double frac, std::uint64_t seed);

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows);

struct AlignConfig {
  std::int64_t window_seconds = 3600;
  double train_frac = 0.7;
  bool chronological_split = false;  // default: seeded random split
  bool scaler_fit_all = false;       // default: fit scalers on the train rows only
  std::uint64_t seed = 42;
};

struct AlignedDataset {
  Eigen::MatrixXd X;  // samples x features, raw units (window means)
  Eigen::MatrixXd Y;  // samples x 7, raw degC
  std::vector<std::int64_t> timestamps;
  std::vector<std::string> feature_names;
  Scaler x_scaler, y_scaler;
  std::vector<Eigen::Index> train_idx, test_idx;
  std::int64_t dropped_empty_windows = 0;

  void check_invariants() const;
};

// Rows inside `sensor_exclude_ts` periods contribute to no window average.
AlignedDataset align_dataset(const SensorTable& sensors, const LabTable& lab,
                             const AlignConfig& cfg,
                             const std::vector<std::pair<std::int64_t, std::int64_t>>&
                                 sensor_exclude_ts = {});

void save_aligned(const AlignedDataset& data, const std::string& path);
AlignedDataset load_aligned(const std::string& path);

}  // namespace softsense
