#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "softsense/tables.hpp"

namespace softsense {

// Batch model: samples x features in, samples x outputs out.
using ModelFn = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

struct ShapValues {
  Eigen::MatrixXd phi;   // features x outputs
  Eigen::VectorXd base;  // mean model output over the background
  Eigen::VectorXd fx;    // model output at x
};

// Exact Shapley values with the interventional coalition value
// v(S) = E_b[f(x_S, b_rest)]; enumerates all 2^n coalitions (n <= 15).
ShapValues shapley_exact(const ModelFn& model, const Eigen::VectorXd& x,
                         const Eigen::MatrixXd& background);

// Castro-style permutation sampling of the same game.
ShapValues shapley_sampled(const ModelFn& model, const Eigen::VectorXd& x,
                           const Eigen::MatrixXd& background, int n_permutations,
                           std::uint64_t seed);

// Feature indices ordered by descending importance, names breaking ties.
std::vector<std::size_t> rank_features(const std::vector<std::string>& names,
                                       const Eigen::VectorXd& importance);

struct ShapSummary {
  std::vector<std::string> feature_names;
  Eigen::MatrixXd mean_abs_phi;       // features x outputs, mean over instances
  std::vector<std::size_t> ranking;   // most important feature first
};

// Shapley values per instance, averaged as |phi|. permutations = 0 means
// exact enumeration; otherwise Castro sampling with the given seed.
ShapSummary explain_instances(const ModelFn& model, const Eigen::MatrixXd& instances,
                              const Eigen::MatrixXd& background,
                              const std::vector<std::string>& feature_names,
                              int permutations = 0, std::uint64_t seed = 0);

// Rows: ranked feature x output point, columns feature,output_point,mean_abs_phi.
void write_shap_csv(const ShapSummary& summary, const std::string& path);

// Seeded draw of up to max_rows distinct rows (ascending order) from X.
Eigen::MatrixXd sample_background(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& rows,
                                  int max_rows, std::uint64_t seed);

}  // namespace softsense
