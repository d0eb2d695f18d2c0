#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace softsense {

double mean(std::span<const double> xs);

// Population variance (divides by n).
double population_variance(std::span<const double> xs);
double population_std(std::span<const double> xs);

// Sample variance (divides by n-1); requires n >= 2.
double sample_variance(std::span<const double> xs);
double sample_std(std::span<const double> xs);

// Quantile by linear interpolation on sorted order statistics (type-7).
// p in [0, 1]; xs need not be sorted. Requires xs nonempty.
double quantile_type7(std::span<const double> xs, double p);

// Upper quantile of the standard normal at confidence `level`, e.g.
// level = 0.95 -> 1.959964 (two-sided).
double normal_two_sided_z(double level);

// Quantile of the F(d1, d2) distribution at probability p.
double f_quantile(double d1, double d2, double p);

}  // namespace softsense
