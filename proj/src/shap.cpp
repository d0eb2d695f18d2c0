#include "softsense/shap.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <fstream>
#include <numeric>

#include "softsense/csv.hpp"
#include "softsense/rng.hpp"

namespace softsense {
namespace {

constexpr int kMaxExactFeatures = 15;

void check_inputs(const Eigen::VectorXd& x, const Eigen::MatrixXd& background) {
  if (x.size() == 0) throw InputError("shap: no features");
  if (background.rows() == 0) throw InputError("shap: empty background");
  if (background.cols() != x.size()) {
    throw InputError("shap: background width does not match the instance");
  }
}

Eigen::VectorXd coalition_value(const ModelFn& model, const Eigen::MatrixXd& composite) {
  const Eigen::MatrixXd out = model(composite);
  if (out.rows() != composite.rows()) throw InputError("shap: model changed the row count");
  return out.colwise().mean().transpose();
}

}  // namespace

ShapValues shapley_exact(const ModelFn& model, const Eigen::VectorXd& x,
                         const Eigen::MatrixXd& background) {
  check_inputs(x, background);
  const int n = static_cast<int>(x.size());
  if (n > kMaxExactFeatures) {
    throw InputError("shap: exact mode supports at most 15 features");
  }

  // v[mask]: mean model output with masked features pinned to x.
  const std::size_t n_masks = std::size_t{1} << n;
  std::vector<Eigen::VectorXd> v(n_masks);
  Eigen::MatrixXd composite = background;
  for (std::size_t mask = 0; mask < n_masks; ++mask) {
    composite = background;
    for (int i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) composite.col(i).setConstant(x(i));
    }
    v[mask] = coalition_value(model, composite);
  }

  std::array<double, kMaxExactFeatures + 1> factorial{};
  factorial[0] = 1.0;
  for (std::size_t i = 1; i < factorial.size(); ++i) {
    factorial[i] = factorial[i - 1] * static_cast<double>(i);
  }

  ShapValues result;
  result.base = v[0];
  result.fx = v[n_masks - 1];
  result.phi = Eigen::MatrixXd::Zero(n, result.base.size());
  for (std::size_t mask = 0; mask < n_masks; ++mask) {
    const int s = std::popcount(mask);
    for (int i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) continue;
      const double weight = factorial[static_cast<std::size_t>(s)] *
                            factorial[static_cast<std::size_t>(n - 1 - s)] /
                            factorial[static_cast<std::size_t>(n)];
      result.phi.row(i) +=
          weight * (v[mask | (std::size_t{1} << i)] - v[mask]).transpose();
    }
  }
  return result;
}

ShapValues shapley_sampled(const ModelFn& model, const Eigen::VectorXd& x,
                           const Eigen::MatrixXd& background, int n_permutations,
                           std::uint64_t seed) {
  check_inputs(x, background);
  if (n_permutations < 1) throw InputError("shap: need at least one permutation");
  const int n = static_cast<int>(x.size());

  ShapValues result;
  result.base = coalition_value(model, background);
  result.phi = Eigen::MatrixXd::Zero(n, result.base.size());

  Rng rng(seed);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Eigen::MatrixXd composite = background;
  for (int rep = 0; rep < n_permutations; ++rep) {
    rng.shuffle(order);
    composite = background;
    Eigen::VectorXd prev = result.base;
    for (int j : order) {
      composite.col(j).setConstant(x(j));
      const Eigen::VectorXd cur = coalition_value(model, composite);
      result.phi.row(j) += (cur - prev).transpose();
      prev = cur;
    }
    if (rep == 0) result.fx = prev;
  }
  result.phi /= static_cast<double>(n_permutations);
  return result;
}

std::vector<std::size_t> rank_features(const std::vector<std::string>& names,
                                       const Eigen::VectorXd& importance) {
  if (static_cast<Eigen::Index>(names.size()) != importance.size()) {
    throw InputError("shap: name and importance counts differ");
  }
  std::vector<std::size_t> order(names.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ia = importance(static_cast<Eigen::Index>(a));
    const double ib = importance(static_cast<Eigen::Index>(b));
    if (ia != ib) return ia > ib;
    return names[a] < names[b];
  });
  return order;
}

ShapSummary explain_instances(const ModelFn& model, const Eigen::MatrixXd& instances,
                              const Eigen::MatrixXd& background,
                              const std::vector<std::string>& feature_names, int permutations,
                              std::uint64_t seed) {
  if (instances.rows() == 0) throw InputError("shap: no instances to explain");
  if (permutations < 0) throw InputError("shap: permutation count must be non-negative");
  if (static_cast<Eigen::Index>(feature_names.size()) != instances.cols()) {
    throw InputError("shap: feature name count does not match the instances");
  }

  ShapSummary summary;
  summary.feature_names = feature_names;
  for (Eigen::Index r = 0; r < instances.rows(); ++r) {
    const Eigen::VectorXd x = instances.row(r).transpose();
    const ShapValues values =
        permutations == 0
            ? shapley_exact(model, x, background)
            : shapley_sampled(model, x, background, permutations,
                              seed ^ static_cast<std::uint64_t>(r));
    if (summary.mean_abs_phi.size() == 0) {
      summary.mean_abs_phi = Eigen::MatrixXd::Zero(values.phi.rows(), values.phi.cols());
    }
    summary.mean_abs_phi += values.phi.cwiseAbs();
  }
  summary.mean_abs_phi /= static_cast<double>(instances.rows());
  summary.ranking = rank_features(feature_names, summary.mean_abs_phi.rowwise().mean());
  return summary;
}

void write_shap_csv(const ShapSummary& summary, const std::string& path) {
  if (summary.mean_abs_phi.cols() != kNumLabPoints) {
    throw InputError("shap: expected 7 output points");
  }
  if (summary.ranking.size() != summary.feature_names.size() ||
      static_cast<Eigen::Index>(summary.feature_names.size()) != summary.mean_abs_phi.rows()) {
    throw InputError("shap: inconsistent summary");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open file for writing: " + path);
  out << "feature,output_point,mean_abs_phi\n";
  for (std::size_t i : summary.ranking) {
    for (int k = 0; k < kNumLabPoints; ++k) {
      out << summary.feature_names[i] << ",p" << kLabPoints[static_cast<std::size_t>(k)] << ','
          << format_double(summary.mean_abs_phi(static_cast<Eigen::Index>(i), k)) << '\n';
    }
  }
  if (!out) throw InputError("write failed: " + path);
}

Eigen::MatrixXd sample_background(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& rows,
                                  int max_rows, std::uint64_t seed) {
  if (rows.empty()) throw InputError("shap: no rows to sample the background from");
  if (max_rows < 1) throw InputError("shap: background size must be positive");
  std::vector<Eigen::Index> pool = rows;
  Rng rng(seed);
  rng.shuffle(pool);
  pool.resize(std::min(pool.size(), static_cast<std::size_t>(max_rows)));
  std::sort(pool.begin(), pool.end());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(pool.size()), x.cols());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool[i] < 0 || pool[i] >= x.rows()) throw InputError("shap: background row out of range");
    out.row(static_cast<Eigen::Index>(i)) = x.row(pool[i]);
  }
  return out;
}

}  // namespace softsense
