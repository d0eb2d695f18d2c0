#include "softsense/lab_prep.hpp"

#include <cmath>
#include <vector>

#include "softsense/stats.hpp"

namespace softsense {

std::pair<LabTable, CleanReport> drop_nulls_duplicates(const LabTable& lab) {
  lab.check_invariants();
  CleanReport report;
  report.stage = "lab";

  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<std::size_t>(lab.rows()));
  std::vector<Eigen::Index> kept_with_ts;  // kept rows sharing the current timestamp
  std::int64_t current_ts = 0;
  for (Eigen::Index r = 0; r < lab.rows(); ++r) {
    if (!lab.row_fully_valid(r)) {
      ++report.removed_null;
      continue;
    }
    const std::int64_t ts = lab.timestamps[static_cast<std::size_t>(r)];
    if (kept_with_ts.empty() || ts != current_ts) {
      kept_with_ts.clear();
      current_ts = ts;
    }
    bool duplicate = false;
    for (Eigen::Index prev : kept_with_ts) {
      if ((lab.values.row(r).array() == lab.values.row(prev).array()).all()) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) {
      ++report.removed_duplicate;
      continue;
    }
    kept_with_ts.push_back(r);
    keep.push_back(r);
  }
  if (keep.empty()) throw InputError("empty lab table");
  return {lab.select_rows(keep), report};
}

SeriesBounds series_iqr_bounds(std::span<const double> values, double multiplier) {
  std::size_t finite = 0;
  for (double v : values) {
    if (std::isfinite(v)) ++finite;
  }
  if (finite < 4) throw InputError("iqr bounds: need at least 4 finite values");
  std::vector<double> xs;
  xs.reserve(finite);
  for (double v : values) {
    if (std::isfinite(v)) xs.push_back(v);
  }
  SeriesBounds b{};
  b.q1 = quantile_type7(xs, 0.25);
  b.q3 = quantile_type7(xs, 0.75);
  b.iqr = b.q3 - b.q1;
  b.lower = b.q1 - multiplier * b.iqr;
  b.upper = b.q3 + multiplier * b.iqr;
  return b;
}

IqrBounds iqr_bounds(const LabTable& lab, double multiplier) {
  lab.check_invariants();
  IqrBounds bounds;
  for (int j = 0; j < kNumLabPoints; ++j) {
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(lab.rows()));
    for (Eigen::Index r = 0; r < lab.rows(); ++r) {
      if (lab.valid(r, j)) xs.push_back(lab.values(r, j));
    }
    const SeriesBounds b = series_iqr_bounds(xs, multiplier);
    bounds.q1[static_cast<std::size_t>(j)] = b.q1;
    bounds.q3[static_cast<std::size_t>(j)] = b.q3;
    bounds.iqr[static_cast<std::size_t>(j)] = b.iqr;
    bounds.lower[static_cast<std::size_t>(j)] = b.lower;
    bounds.upper[static_cast<std::size_t>(j)] = b.upper;
  }
  return bounds;
}

std::pair<LabTable, CleanReport> flag_outlier_union(const LabTable& lab, const IqrBounds& bounds) {
  lab.check_invariants();
  CleanReport report;
  report.stage = "lab";
  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<std::size_t>(lab.rows()));
  for (Eigen::Index r = 0; r < lab.rows(); ++r) {
    bool exceeds = false;
    for (int j = 0; j < kNumLabPoints && !exceeds; ++j) {
      if (!lab.valid(r, j)) continue;
      const double v = lab.values(r, j);
      exceeds = v < bounds.lower[static_cast<std::size_t>(j)] ||
                v > bounds.upper[static_cast<std::size_t>(j)];
    }
    if (exceeds) {
      ++report.removed_outlier;
    } else {
      keep.push_back(r);
    }
  }
  if (keep.empty()) throw InputError("empty lab table");
  return {lab.select_rows(keep), report};
}

LabCleanResult clean_lab(const LabTable& lab, double iqr_multiplier) {
  auto [deduped, base_report] = drop_nulls_duplicates(lab);
  const IqrBounds bounds = iqr_bounds(deduped, iqr_multiplier);
  auto [cleaned, outlier_report] = flag_outlier_union(deduped, bounds);
  base_report.removed_outlier = outlier_report.removed_outlier;
  base_report.metrics["rows_in"] = static_cast<double>(lab.rows());
  base_report.metrics["rows_out"] = static_cast<double>(cleaned.rows());
  return {std::move(cleaned), std::move(base_report), bounds};
}

}  // namespace softsense
