#include "softsense/tables.hpp"

#include <set>
#include <stdexcept>

namespace softsense {

void SensorTable::check_invariants() const {
  if (static_cast<Eigen::Index>(timestamps.size()) != values.rows()) {
    throw std::runtime_error("sensor table: timestamp count differs from row count");
  }
  if (static_cast<Eigen::Index>(names.size()) != values.cols()) {
    throw std::runtime_error("sensor table: name count differs from column count");
  }
  if (values.rows() != valid.rows() || values.cols() != valid.cols()) {
    throw std::runtime_error("sensor table: values and valid mask differ in shape");
  }
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    if (timestamps[i] <= timestamps[i - 1]) {
      throw std::runtime_error("sensor table: timestamps not strictly increasing");
    }
  }
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) throw std::runtime_error("duplicate sensor: " + n);
  }
}

bool LabTable::row_fully_valid(Eigen::Index r) const {
  for (int c = 0; c < kNumLabPoints; ++c) {
    if (!valid(r, c)) return false;
  }
  return true;
}

LabTable LabTable::select_rows(const std::vector<Eigen::Index>& keep) const {
  LabTable out;
  out.timestamps.reserve(keep.size());
  out.values.resize(static_cast<Eigen::Index>(keep.size()), kNumLabPoints);
  out.valid.resize(static_cast<Eigen::Index>(keep.size()), kNumLabPoints);
  Eigen::Index w = 0;
  for (Eigen::Index r : keep) {
    out.timestamps.push_back(timestamps[static_cast<std::size_t>(r)]);
    out.values.row(w) = values.row(r);
    out.valid.row(w) = valid.row(r);
    ++w;
  }
  return out;
}

void LabTable::check_invariants() const {
  if (values.cols() != kNumLabPoints) {
    throw std::runtime_error("lab table: expected 7 distillation points");
  }
  if (static_cast<Eigen::Index>(timestamps.size()) != values.rows()) {
    throw std::runtime_error("lab table: timestamp count differs from row count");
  }
  if (values.rows() != valid.rows() || values.cols() != valid.cols()) {
    throw std::runtime_error("lab table: values and valid mask differ in shape");
  }
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    if (timestamps[i] < timestamps[i - 1]) {
      throw std::runtime_error("lab table: timestamps decrease");
    }
  }
}

void CleanReport::check_invariants() const {
  if (removed_null < 0 || removed_duplicate < 0 || removed_outlier < 0) {
    throw std::runtime_error("clean report: negative count");
  }
  for (const auto& [name, count] : repaired_short_term) {
    if (count < 0) throw std::runtime_error("clean report: negative repair count for " + name);
  }
  std::int64_t prev_end = INT64_MIN;
  for (const auto& [start, end] : long_term_periods) {
    if (start > end) throw std::runtime_error("clean report: period start after end");
    if (start <= prev_end) throw std::runtime_error("clean report: periods overlap or unordered");
    prev_end = end;
  }
}

}  // namespace softsense
