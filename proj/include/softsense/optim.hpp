#pragma once

#include <functional>

#include <Eigen/Core>

namespace softsense {

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Derivative-free simplex descent (reflection 1, expansion 2, contraction 0.5,
// shrink 0.5). Stops when the simplex value spread falls below
// tol * (|f_best| + tol) or after max_iter iterations.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, double step, double tol, int max_iter);

}  // namespace softsense
