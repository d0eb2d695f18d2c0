#pragma once

#include <array>
#include <span>
#include <utility>

#include "softsense/tables.hpp"

namespace softsense {

// Tukey fences per distillation point.
struct IqrBounds {
  std::array<double, kNumLabPoints> q1{}, q3{}, iqr{}, lower{}, upper{};
};

// Fences for one series; building block of iqr_bounds.
struct SeriesBounds {
  double q1, q3, iqr, lower, upper;
};

// Removes rows with any invalid cell, then exact duplicates (same timestamp
// and identical 7 values), keeping the first occurrence.
std::pair<LabTable, CleanReport> drop_nulls_duplicates(const LabTable& lab);

SeriesBounds series_iqr_bounds(std::span<const double> values, double multiplier = 1.5);
IqrBounds iqr_bounds(const LabTable& lab, double multiplier = 1.5);

// Removes every row with at least one point strictly outside its fences.
std::pair<LabTable, CleanReport> flag_outlier_union(const LabTable& lab, const IqrBounds& bounds);

// drop_nulls_duplicates + iqr_bounds + flag_outlier_union with a merged report.
struct LabCleanResult {
  LabTable lab;
  CleanReport report;
  IqrBounds bounds;
};
LabCleanResult clean_lab(const LabTable& lab, double iqr_multiplier = 1.5);

}  // namespace softsense
