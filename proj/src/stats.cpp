#include "softsense/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>

namespace softsense {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean: empty input");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double population_variance(std::span<const double> xs) {
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size());
}

double population_std(std::span<const double> xs) {
  return std::sqrt(population_variance(xs));
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("sample_variance: need n >= 2");
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

double sample_std(std::span<const double> xs) {
  return std::sqrt(sample_variance(xs));
}

double quantile_type7(std::span<const double> xs, double p) {
  if (xs.empty()) throw std::invalid_argument("quantile_type7: empty input");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("quantile_type7: p outside [0,1]");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - std::floor(h);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double normal_two_sided_z(double level) {
  boost::math::normal_distribution<double> dist;
  return boost::math::quantile(dist, 0.5 + level / 2.0);
}

double f_quantile(double d1, double d2, double p) {
  boost::math::fisher_f_distribution<double> dist(d1, d2);
  return boost::math::quantile(dist, p);
}

}  // namespace softsense
