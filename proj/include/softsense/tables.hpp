#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace softsense {

using BoolMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// The 7 distillation points of the boiling curve, in vol%.
inline constexpr std::array<int, 7> kLabPoints = {2, 10, 30, 50, 70, 90, 100};
inline constexpr int kNumLabPoints = 7;

// Raised when an input file or prior-stage artifact is missing or malformed
// at the boundary; the CLI maps it to exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Wide matrix of plant signals at 1-minute cadence.
struct SensorTable {
  std::vector<std::int64_t> timestamps;  // epoch seconds, strictly increasing
  std::vector<std::string> names;        // unique sensor identifiers
  Eigen::MatrixXd values;                // rows x sensors
  BoolMask valid;                        // same shape as values

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  void check_invariants() const;
};

// Daily distillation-curve records (7 points, degC).
struct LabTable {
  std::vector<std::int64_t> timestamps;  // epoch seconds, non-decreasing
  Eigen::MatrixXd values;                // days x 7
  BoolMask valid;

  Eigen::Index rows() const { return values.rows(); }
  bool row_fully_valid(Eigen::Index r) const;
  LabTable select_rows(const std::vector<Eigen::Index>& keep) const;
  void check_invariants() const;
};

// Per-stage ledger of removed/repaired points.
struct CleanReport {
  std::string stage;
  std::int64_t removed_null = 0;
  std::int64_t removed_duplicate = 0;
  std::int64_t removed_outlier = 0;
  std::map<std::string, std::int64_t> repaired_short_term;  // per sensor
  std::vector<std::pair<std::int64_t, std::int64_t>> long_term_periods;  // [start, end] timestamps
  std::map<std::string, double> metrics;

  void check_invariants() const;
};

}  // namespace softsense
