#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "softsense/tables.hpp"

namespace softsense {

// Two-sided 95% normal quantile used for every confidence interval.
inline constexpr double kCiZ = 1.959964;

// Column-wise mean absolute error; rows are samples.
Eigen::VectorXd mae_per_point(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets);

struct ThresholdCheck {
  std::vector<bool> point_pass;  // strict mae < threshold
  bool all_pass = false;
};

ThresholdCheck threshold_check(const Eigen::VectorXd& mae,
                               const std::array<double, kNumLabPoints>& thresholds);

struct CiAnalysis {
  double mean = 0.0;        // pooled over every error
  double half_width = 0.0;  // z * sample std (n-1)
  double frac_outside = 0.0;
  Eigen::VectorXd point_mean, point_half_width, point_frac_outside;
};

// errors: samples x points (prediction minus reference). A zero-width
// interval (constant errors) contains its own value, so frac_outside is 0.
CiAnalysis ci_analysis(const Eigen::MatrixXd& errors);

struct Histogram {
  double lo = 0.0, hi = 0.0;  // value range; equal when all values coincide
  std::vector<std::int64_t> counts;
};

Histogram histogram(std::span<const double> values, int bins = 30);

// Two columns: bin_start,count.
void write_histogram_csv(const Histogram& h, const std::string& path);

}  // namespace softsense
