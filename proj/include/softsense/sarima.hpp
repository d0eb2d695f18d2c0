#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "softsense/tables.hpp"

namespace softsense {

// Raised when a model cannot be fit (non-convergence, explosive or
// non-invertible solutions, degenerate data). Distinct from InputError: a
// FitError is a computation failure, not a usage mistake.
struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SarimaOrder {
  int p = 0, d = 0, q = 0;  // non-seasonal AR / differencing / MA orders
  int P = 0, D = 0, Q = 0;  // seasonal counterparts
  int m = 1;                // seasonal period

  void validate() const;
  int coef_count() const { return p + q + P + Q; }
};

struct SarimaFit {
  SarimaOrder order;
  Eigen::VectorXd phi, theta, Phi, Theta;
  double intercept = 0.0;
  double sigma2 = 0.0;  // SSE / n_obs on the differenced scale
  double aic = 0.0;     // n_obs * ln(sigma2) + 2 * (k + 1), k = coefficients incl. intercept
  Eigen::Index n_obs = 0;  // residuals entering the conditional sum of squares
};

// Per-distillation-point baseline MAE in original degC.
struct BaselineThresholds {
  std::array<double, kNumLabPoints> mae{};
  std::array<SarimaOrder, kNumLabPoints> orders{};
};

// d regular differences followed by D seasonal differences at lag m.
std::vector<double> difference(std::span<const double> x, int d, int D, int m);
// Inverse of difference(); head holds the first d + m*D values of the original.
std::vector<double> undifference(std::span<const double> w, std::span<const double> head, int d,
                                 int D, int m);

struct AdfResult {
  double statistic = 0.0;
  bool reject = false;  // unit root rejected at the MacKinnon 5% level
};

// Augmented Dickey-Fuller regression with constant and max_lag lagged
// differences. A (near-)constant series counts as trivially stationary.
AdfResult adf_test(std::span<const double> series, int max_lag);

// Smallest d in {0,1,2} whose d-times differenced series rejects the unit
// root; 2 if none does.
int select_d(std::span<const double> series);

// Seasonal stability statistic: cumulative per-season sums of the demeaned
// series, normalized by the per-season variance estimate. Large values mean a
// persistent seasonal pattern.
double seasonal_stability_stat(std::span<const double> series, int m);
// Simulated 5% critical value of the statistic under white noise.
double seasonal_critical_value(int m);
// D in {0,1}; fires when the stability statistic exceeds its 5% critical
// value. Fewer than 2*m observations (or m == 1) give D=0, with a note in
// *warning when provided.
int select_D(std::span<const double> series, int m, std::string* warning = nullptr);

// Conditional-sum-of-squares fit by simplex descent from zero coefficients.
SarimaFit fit_css(std::span<const double> series, const SarimaOrder& order);

// Stepwise AIC search over (p,q,P,Q) from the four standard starting orders,
// with d and D chosen by select_d / select_D.
SarimaFit stepwise_search(std::span<const double> series, int m);

// Mean absolute in-sample one-step-ahead forecast error. Identical in the
// differenced and original scales, so the result is in original units.
double one_step_forecast_mae(std::span<const double> series, const SarimaFit& fit);

// stepwise_search + one_step_forecast_mae per lab point column of y.
BaselineThresholds baseline_thresholds(const Eigen::MatrixXd& y, int m);

}  // namespace softsense
