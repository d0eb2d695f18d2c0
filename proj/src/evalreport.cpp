#include "softsense/evalreport.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "softsense/csv.hpp"

namespace softsense {

Eigen::VectorXd mae_per_point(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets) {
  if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols()) {
    throw InputError("eval: prediction and target shapes differ");
  }
  if (predictions.rows() == 0) throw InputError("eval: no samples");
  return (predictions - targets).cwiseAbs().colwise().mean().transpose();
}

ThresholdCheck threshold_check(const Eigen::VectorXd& mae,
                               const std::array<double, kNumLabPoints>& thresholds) {
  if (mae.size() != kNumLabPoints) throw InputError("eval: expected 7 mae values");
  ThresholdCheck check;
  check.all_pass = true;
  for (int k = 0; k < kNumLabPoints; ++k) {
    const bool ok = mae(k) < thresholds[static_cast<std::size_t>(k)];
    check.point_pass.push_back(ok);
    check.all_pass = check.all_pass && ok;
  }
  return check;
}

namespace {

struct Interval {
  double mean, half_width, frac_outside;
};

Interval interval_of(const Eigen::VectorXd& e) {
  Interval out{};
  const auto n = e.size();
  out.mean = e.mean();
  double ss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) ss += (e(i) - out.mean) * (e(i) - out.mean);
  const double sample_std = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  out.half_width = kCiZ * sample_std;
  std::int64_t outside = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (e(i) < out.mean - out.half_width || e(i) > out.mean + out.half_width) ++outside;
  }
  out.frac_outside = static_cast<double>(outside) / static_cast<double>(n);
  return out;
}

}  // namespace

CiAnalysis ci_analysis(const Eigen::MatrixXd& errors) {
  if (errors.rows() == 0 || errors.cols() == 0) throw InputError("eval: no errors to analyze");
  CiAnalysis ci;
  const Eigen::VectorXd pooled =
      Eigen::Map<const Eigen::VectorXd>(errors.data(), errors.size());
  const Interval all = interval_of(pooled);
  ci.mean = all.mean;
  ci.half_width = all.half_width;
  ci.frac_outside = all.frac_outside;
  ci.point_mean.resize(errors.cols());
  ci.point_half_width.resize(errors.cols());
  ci.point_frac_outside.resize(errors.cols());
  for (Eigen::Index k = 0; k < errors.cols(); ++k) {
    const Interval one = interval_of(errors.col(k));
    ci.point_mean(k) = one.mean;
    ci.point_half_width(k) = one.half_width;
    ci.point_frac_outside(k) = one.frac_outside;
  }
  return ci;
}

Histogram histogram(std::span<const double> values, int bins) {
  if (values.empty()) throw InputError("histogram: no values");
  if (bins < 1) throw InputError("histogram: need at least one bin");
  Histogram h;
  h.lo = *std::min_element(values.begin(), values.end());
  h.hi = *std::max_element(values.begin(), values.end());
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  const double width = (h.hi - h.lo) / static_cast<double>(bins);
  for (double v : values) {
    std::size_t idx = 0;
    if (width > 0.0) {
      idx = static_cast<std::size_t>((v - h.lo) / width);
      if (idx >= h.counts.size()) idx = h.counts.size() - 1;  // v == hi
    }
    ++h.counts[idx];
  }
  return h;
}

void write_histogram_csv(const Histogram& h, const std::string& path) {
  if (h.counts.empty()) throw InputError("histogram: empty");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open file for writing: " + path);
  out << "bin_start,count\n";
  const double width = (h.hi - h.lo) / static_cast<double>(h.counts.size());
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out << format_double(h.lo + width * static_cast<double>(i)) << ',' << h.counts[i] << '\n';
  }
  if (!out) throw InputError("write failed: " + path);
}

}  // namespace softsense
