#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "softsense/tables.hpp"

namespace softsense {

// Piecewise-constant segmentation of one signal.
struct Segmentation {
  std::vector<Eigen::Index> breakpoints;  // strictly increasing, exclusive ends
  std::vector<double> seg_mean, seg_std;  // one per segment (population std)

  std::size_t segments() const { return seg_mean.size(); }
  // Segment index owning sample i, given the signal length used to build this.
  std::size_t segment_of(Eigen::Index i) const;
};

// Binary segmentation under the Gaussian mean-shift likelihood with
// per-segment variance; a split is accepted when its log-likelihood gain
// exceeds `penalty`.
Segmentation detect_change_points(std::span<const double> signal, double penalty,
                                  Eigen::Index min_seg);

struct RepairResult {
  std::vector<double> values;
  std::vector<Eigen::Index> repaired;  // indices replaced by their segment mean
};
RepairResult repair_short_term(std::span<const double> signal, const Segmentation& seg);

struct PcaModel {
  Eigen::VectorXd mean, std;     // per-feature standardization (population std)
  Eigen::MatrixXd components;    // features x retained, column-orthonormal
  Eigen::VectorXd eigvals;       // retained variances, non-increasing
  int retained = 0;
  Eigen::Index n_obs = 0;
};

PcaModel fit_pca(const Eigen::MatrixXd& signals, double var_target,
                 const std::vector<std::string>& names = {});

Eigen::VectorXd hotelling_t2(const Eigen::MatrixXd& signals, const PcaModel& pca);

struct AnomalyPeriods {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> periods;  // inclusive row ranges
  double t2_limit = 0.0;
};

AnomalyPeriods hotelling_periods(const Eigen::MatrixXd& signals, const PcaModel& pca,
                                 double alpha, Eigen::Index min_duration);

std::vector<std::pair<std::int64_t, std::int64_t>> periods_to_timestamps(
    const AnomalyPeriods& periods, std::span<const std::int64_t> timestamps);

// Removes lab rows whose timestamp falls inside any [start, end] period.
std::pair<LabTable, CleanReport> mask_lab_in_periods(
    const LabTable& lab, const std::vector<std::pair<std::int64_t, std::int64_t>>& period_ts);

// Full sensor-cleaning stage: fill missing cells (last observation carried
// forward), segment + repair each signal, then detect long-term periods.
struct SensorCleanResult {
  SensorTable sensors;  // repaired values, all cells valid
  CleanReport report;   // stage "sensors"
  AnomalyPeriods periods;
  PcaModel pca;
};

struct SensorCleanConfig {
  double penalty_factor = 3.0;  // penalty = factor * ln(n)
  Eigen::Index min_seg = 30;
  double var_target = 0.90;
  double alpha = 0.99;
  Eigen::Index min_duration = 60;
};

SensorCleanResult clean_sensors(const SensorTable& sensors, const SensorCleanConfig& cfg);

}  // namespace softsense
