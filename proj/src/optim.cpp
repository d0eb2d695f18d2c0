#include "softsense/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace softsense {

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, double step, double tol, int max_iter) {
  const auto n = static_cast<std::size_t>(x0.size());
  if (n == 0) throw std::invalid_argument("nelder_mead: empty parameter vector");
  if (!(step > 0.0) || !(tol > 0.0)) throw std::invalid_argument("nelder_mead: bad step or tol");

  std::vector<Eigen::VectorXd> xs(n + 1, x0);
  std::vector<double> fs(n + 1);
  for (std::size_t i = 0; i < n; ++i) xs[i + 1](static_cast<Eigen::Index>(i)) += step;
  for (std::size_t i = 0; i <= n; ++i) fs[i] = f(xs[i]);

  std::vector<std::size_t> order(n + 1);
  NelderMeadResult result;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[n - 1];

    if (fs[worst] - fs[best] <= tol * (std::abs(fs[best]) + tol)) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(x0.size());
    for (std::size_t i = 0; i <= n; ++i) {
      if (i != worst) centroid += xs[i];
    }
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + (centroid - xs[worst]);
    const double fr = f(reflected);
    if (fr < fs[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - xs[worst]);
      const double fe = f(expanded);
      if (fe < fr) {
        xs[worst] = expanded;
        fs[worst] = fe;
      } else {
        xs[worst] = reflected;
        fs[worst] = fr;
      }
      continue;
    }
    if (fr < fs[second_worst]) {
      xs[worst] = reflected;
      fs[worst] = fr;
      continue;
    }

    const bool outside = fr < fs[worst];
    const Eigen::VectorXd contracted =
        outside ? centroid + 0.5 * (reflected - centroid) : centroid + 0.5 * (xs[worst] - centroid);
    const double fc = f(contracted);
    if (fc < std::min(fr, fs[worst])) {
      xs[worst] = contracted;
      fs[worst] = fc;
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      xs[i] = xs[best] + 0.5 * (xs[i] - xs[best]);
      fs[i] = f(xs[i]);
    }
  }

  const auto best_it = std::min_element(fs.begin(), fs.end());
  result.x = xs[static_cast<std::size_t>(best_it - fs.begin())];
  result.value = *best_it;
  result.iterations = iter;
  return result;
}

}  // namespace softsense
