#include "softsense/sensor_prep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "softsense/stats.hpp"

namespace softsense {
namespace {

constexpr double kVarFloor = 1e-12;

// Gaussian maximum-likelihood cost of [s, e) from prefix sums: len * ln(var).
struct SegmentCost {
  std::vector<double> sum, sumsq;

  explicit SegmentCost(std::span<const double> x) : sum(x.size() + 1, 0.0), sumsq(x.size() + 1, 0.0) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      sum[i + 1] = sum[i] + x[i];
      sumsq[i + 1] = sumsq[i] + x[i] * x[i];
    }
  }

  double variance(Eigen::Index s, Eigen::Index e) const {
    const double len = static_cast<double>(e - s);
    const double total = sum[static_cast<std::size_t>(e)] - sum[static_cast<std::size_t>(s)];
    const double total2 = sumsq[static_cast<std::size_t>(e)] - sumsq[static_cast<std::size_t>(s)];
    return std::max(total2 / len - (total / len) * (total / len), 0.0);
  }

  double cost(Eigen::Index s, Eigen::Index e) const {
    return static_cast<double>(e - s) * std::log(std::max(variance(s, e), kVarFloor));
  }

  double mean(Eigen::Index s, Eigen::Index e) const {
    return (sum[static_cast<std::size_t>(e)] - sum[static_cast<std::size_t>(s)]) /
           static_cast<double>(e - s);
  }
};

}  // namespace

std::size_t Segmentation::segment_of(Eigen::Index i) const {
  std::size_t k = 0;
  while (k < breakpoints.size() && i >= breakpoints[k]) ++k;
  return k;
}

Segmentation detect_change_points(std::span<const double> signal, double penalty,
                                  Eigen::Index min_seg) {
  const auto n = static_cast<Eigen::Index>(signal.size());
  if (min_seg < 1) throw InputError("change points: min_seg must be positive");
  if (n < 2 * min_seg) throw InputError("change points: series too short");
  for (double v : signal) {
    if (!std::isfinite(v)) throw InputError("change points: signal must be finite");
  }

  const SegmentCost cost(signal);
  Segmentation seg;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> stack = {{0, n}};
  while (!stack.empty()) {
    const auto [s, e] = stack.back();
    stack.pop_back();
    if (e - s < 2 * min_seg) continue;
    const double whole = cost.cost(s, e);
    double best_gain = 0.0;
    Eigen::Index best_b = -1;
    for (Eigen::Index b = s + min_seg; b <= e - min_seg; ++b) {
      const double gain = whole - cost.cost(s, b) - cost.cost(b, e);
      if (gain > best_gain) {
        best_gain = gain;
        best_b = b;
      }
    }
    if (best_b >= 0 && best_gain > penalty) {
      seg.breakpoints.push_back(best_b);
      stack.emplace_back(s, best_b);
      stack.emplace_back(best_b, e);
    }
  }
  std::sort(seg.breakpoints.begin(), seg.breakpoints.end());

  Eigen::Index start = 0;
  for (std::size_t k = 0; k <= seg.breakpoints.size(); ++k) {
    const Eigen::Index end = k < seg.breakpoints.size() ? seg.breakpoints[k] : n;
    seg.seg_mean.push_back(cost.mean(start, end));
    seg.seg_std.push_back(std::sqrt(cost.variance(start, end)));
    start = end;
  }
  return seg;
}

RepairResult repair_short_term(std::span<const double> signal, const Segmentation& seg) {
  RepairResult out;
  out.values.assign(signal.begin(), signal.end());
  std::size_t k = 0;
  Eigen::Index next_break = seg.breakpoints.empty() ? -1 : seg.breakpoints[0];
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(signal.size()); ++i) {
    while (next_break >= 0 && i >= next_break) {
      ++k;
      next_break = k < seg.breakpoints.size() ? seg.breakpoints[k] : -1;
    }
    const double mean = seg.seg_mean[k];
    if (std::abs(signal[static_cast<std::size_t>(i)] - mean) > 3.0 * seg.seg_std[k]) {
      out.values[static_cast<std::size_t>(i)] = mean;
      out.repaired.push_back(i);
    }
  }
  return out;
}

PcaModel fit_pca(const Eigen::MatrixXd& signals, double var_target,
                 const std::vector<std::string>& names) {
  const Eigen::Index n = signals.rows();
  const Eigen::Index p = signals.cols();
  if (n < p) throw InputError("pca: need at least as many rows as columns");
  if (!(var_target > 0.0 && var_target <= 1.0)) {
    throw InputError("pca: var_target must lie in (0, 1]");
  }

  PcaModel model;
  model.n_obs = n;
  model.mean = signals.colwise().mean().transpose();
  Eigen::MatrixXd centered = signals.rowwise() - model.mean.transpose();
  model.std.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    model.std(j) = std::sqrt(centered.col(j).squaredNorm() / static_cast<double>(n));
    if (model.std(j) <= 0.0) {
      const std::string label = j < static_cast<Eigen::Index>(names.size())
                                    ? names[static_cast<std::size_t>(j)]
                                    : "column " + std::to_string(j);
      throw InputError("pca: zero-variance signal: " + label);
    }
    centered.col(j) /= model.std(j);
  }

  const Eigen::MatrixXd corr = centered.transpose() * centered / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
  if (eig.info() != Eigen::Success) throw InputError("pca: eigendecomposition failed");

  // Eigen returns ascending order; flip to non-increasing.
  Eigen::VectorXd values = eig.eigenvalues().reverse();
  Eigen::MatrixXd vectors = eig.eigenvectors().rowwise().reverse();
  const double total = values.sum();
  int retained = 0;
  double cum = 0.0;
  while (retained < p) {
    cum += values(retained);
    ++retained;
    if (cum >= var_target * total) break;
  }
  // Deterministic sign: largest-magnitude loading of each component positive.
  for (int k = 0; k < retained; ++k) {
    Eigen::Index arg = 0;
    vectors.col(k).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, k) < 0.0) vectors.col(k) = -vectors.col(k);
  }
  model.components = vectors.leftCols(retained);
  model.eigvals = values.head(retained);
  model.retained = retained;
  return model;
}

Eigen::VectorXd hotelling_t2(const Eigen::MatrixXd& signals, const PcaModel& pca) {
  if (signals.cols() != pca.mean.size()) throw InputError("hotelling: feature count mismatch");
  Eigen::MatrixXd z = signals.rowwise() - pca.mean.transpose();
  for (Eigen::Index j = 0; j < z.cols(); ++j) z.col(j) /= pca.std(j);
  const Eigen::MatrixXd scores = z * pca.components;
  Eigen::VectorXd t2 = Eigen::VectorXd::Zero(signals.rows());
  for (int k = 0; k < pca.retained; ++k) {
    t2 += scores.col(k).array().square().matrix() / pca.eigvals(k);
  }
  return t2;
}

AnomalyPeriods hotelling_periods(const Eigen::MatrixXd& signals, const PcaModel& pca,
                                 double alpha, Eigen::Index min_duration) {
  const double n = static_cast<double>(pca.n_obs);
  const double a = static_cast<double>(pca.retained);
  if (pca.n_obs <= pca.retained) throw InputError("hotelling: need more observations than components");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("hotelling: alpha must lie in (0, 1)");

  AnomalyPeriods out;
  out.t2_limit = a * (n * n - 1.0) / (n * (n - a)) * f_quantile(a, n - a, alpha);

  const Eigen::VectorXd t2 = hotelling_t2(signals, pca);
  Eigen::Index run_start = -1;
  for (Eigen::Index i = 0; i <= t2.size(); ++i) {
    const bool exceed = i < t2.size() && t2(i) > out.t2_limit;
    if (exceed && run_start < 0) run_start = i;
    if (!exceed && run_start >= 0) {
      if (i - run_start >= min_duration) out.periods.emplace_back(run_start, i - 1);
      run_start = -1;
    }
  }
  return out;
}

std::vector<std::pair<std::int64_t, std::int64_t>> periods_to_timestamps(
    const AnomalyPeriods& periods, std::span<const std::int64_t> timestamps) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  out.reserve(periods.periods.size());
  for (const auto& [s, e] : periods.periods) {
    out.emplace_back(timestamps[static_cast<std::size_t>(s)],
                     timestamps[static_cast<std::size_t>(e)]);
  }
  return out;
}

std::pair<LabTable, CleanReport> mask_lab_in_periods(
    const LabTable& lab, const std::vector<std::pair<std::int64_t, std::int64_t>>& period_ts) {
  lab.check_invariants();
  CleanReport report;
  report.stage = "mask";
  report.long_term_periods = period_ts;
  report.check_invariants();

  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<std::size_t>(lab.rows()));
  std::int64_t masked = 0;
  for (Eigen::Index r = 0; r < lab.rows(); ++r) {
    const std::int64_t ts = lab.timestamps[static_cast<std::size_t>(r)];
    bool inside = false;
    for (const auto& [s, e] : period_ts) {
      if (ts >= s && ts <= e) {
        inside = true;
        break;
      }
    }
    if (inside) {
      ++masked;
    } else {
      keep.push_back(r);
    }
  }
  if (keep.empty()) throw InputError("empty lab table");
  report.metrics["masked_rows"] = static_cast<double>(masked);
  return {lab.select_rows(keep), report};
}

SensorCleanResult clean_sensors(const SensorTable& sensors, const SensorCleanConfig& cfg) {
  sensors.check_invariants();
  if (sensors.rows() == 0) throw InputError("empty sensor table");

  SensorCleanResult out;
  out.sensors = sensors;
  out.report.stage = "sensors";

  const Eigen::Index n = sensors.rows();
  const double penalty = cfg.penalty_factor * std::log(static_cast<double>(n));

  for (Eigen::Index j = 0; j < sensors.cols(); ++j) {
    const std::string& name = sensors.names[static_cast<std::size_t>(j)];
    // Fill missing cells by last observation carried forward (backward for a
    // leading gap) so the segmentation sees a finite series.
    std::vector<double> x(static_cast<std::size_t>(n));
    std::int64_t filled = 0;
    double last = std::numeric_limits<double>::quiet_NaN();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (out.sensors.valid(i, j)) {
        last = out.sensors.values(i, j);
      } else {
        ++filled;
      }
      x[static_cast<std::size_t>(i)] = last;
    }
    if (std::isnan(x.back())) throw InputError("sensor " + name + " has no valid samples");
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      if (std::isnan(x[static_cast<std::size_t>(i)])) {
        x[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i) + 1];
      }
    }
    if (filled > 0) out.report.metrics["filled_missing." + name] = static_cast<double>(filled);

    const Segmentation seg = detect_change_points(x, penalty, cfg.min_seg);
    RepairResult repaired = repair_short_term(x, seg);
    out.report.repaired_short_term[name] = static_cast<std::int64_t>(repaired.repaired.size());
    out.report.metrics["segments." + name] = static_cast<double>(seg.segments());
    for (Eigen::Index i = 0; i < n; ++i) {
      out.sensors.values(i, j) = repaired.values[static_cast<std::size_t>(i)];
      out.sensors.valid(i, j) = true;
    }
  }

  out.pca = fit_pca(out.sensors.values, cfg.var_target, sensors.names);
  out.periods = hotelling_periods(out.sensors.values, out.pca, cfg.alpha, cfg.min_duration);
  out.report.long_term_periods = periods_to_timestamps(out.periods, out.sensors.timestamps);
  out.report.metrics["t2_limit"] = out.periods.t2_limit;
  out.report.metrics["pca_retained"] = static_cast<double>(out.pca.retained);
  out.report.check_invariants();
  return out;
}

}  // namespace softsense
