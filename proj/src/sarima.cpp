#include "softsense/sarima.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <tuple>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "softsense/optim.hpp"
#include "softsense/stats.hpp"

namespace softsense {
namespace {

constexpr double kVarGuard = 1e-12;

// MacKinnon (2010) 5% response-surface critical value, constant-only case.
double mackinnon_cv(double n) {
  return -2.86154 - 2.8903 / n - 4.234 / (n * n) - 40.04 / (n * n * n);
}

// Schwert's rule of thumb for the ADF lag order.
int schwert_lag(std::size_t n) {
  const int lag = static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
  const int cap = static_cast<int>(n) / 2 - 8;
  return std::max(0, std::min(lag, cap));
}

// Multiplicative polynomial expansion. AR: (1 - sum phi_i B^i)(1 - sum Phi_j B^(jm))
// with cross sign -1; MA: (1 + ...)(1 + ...) with cross sign +1. Returns the
// lag coefficients a_1..a_(len) of the expanded polynomial written as
// 1 -/+ sum a_i B^i matching the recursion convention below.
Eigen::VectorXd expand_poly(const Eigen::VectorXd& regular, const Eigen::VectorXd& seasonal, int m,
                            double cross_sign) {
  const auto p = regular.size();
  const auto P = seasonal.size();
  Eigen::VectorXd full = Eigen::VectorXd::Zero(p + static_cast<Eigen::Index>(m) * P);
  for (Eigen::Index i = 0; i < p; ++i) full(i) += regular(i);
  for (Eigen::Index j = 0; j < P; ++j) full((j + 1) * m - 1) += seasonal(j);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < P; ++j) {
      full(i + (j + 1) * m) += cross_sign * regular(i) * seasonal(j);
    }
  }
  return full;
}

// Conditional sum of squared innovations for
//   w_t = c + sum_i a_i w_{t-i} + e_t + sum_j b_j e_{t-j},
// conditioning on the first |a| observations and zero pre-sample innovations.
double css_sse(const std::vector<double>& w, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
               double c, std::vector<double>* residuals = nullptr) {
  const auto n = static_cast<Eigen::Index>(w.size());
  const auto na = a.size();
  const auto nb = b.size();
  std::vector<double> eps(w.size(), 0.0);
  double sse = 0.0;
  for (Eigen::Index t = na; t < n; ++t) {
    double pred = c;
    for (Eigen::Index i = 0; i < na; ++i) pred += a(i) * w[static_cast<std::size_t>(t - 1 - i)];
    const Eigen::Index usable = std::min(nb, t - na);
    for (Eigen::Index j = 0; j < usable; ++j) pred += b(j) * eps[static_cast<std::size_t>(t - 1 - j)];
    const double e = w[static_cast<std::size_t>(t)] - pred;
    eps[static_cast<std::size_t>(t)] = e;
    sse += e * e;
    if (!std::isfinite(sse)) return std::numeric_limits<double>::infinity();
  }
  if (residuals) *residuals = std::move(eps);
  return sse;
}

// Magnitude of the smallest root of 1 + sum coefs_i z^i (positive sign
// convention; negate AR coefficients before calling). Infinity for the
// zero polynomial.
double min_root_magnitude(const Eigen::VectorXd& coefs) {
  Eigen::Index degree = coefs.size();
  while (degree > 0 && std::abs(coefs(degree - 1)) < 1e-12) --degree;
  if (degree == 0) return std::numeric_limits<double>::infinity();
  // Companion matrix of the monic reversal: roots of c_deg z^deg + ... + c_1 z + 1.
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  const double lead = coefs(degree - 1);
  companion(0, degree - 1) = -1.0 / lead;
  for (Eigen::Index i = 1; i < degree; ++i) {
    companion(i, i - 1) = 1.0;
    companion(i, degree - 1) = -coefs(i - 1) / lead;
  }
  const Eigen::VectorXcd eigs = companion.eigenvalues();
  double min_mag = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < eigs.size(); ++i) min_mag = std::min(min_mag, std::abs(eigs(i)));
  return min_mag;
}

struct UnpackedParams {
  Eigen::VectorXd phi, theta, Phi, Theta;
  double intercept = 0.0;
};

UnpackedParams unpack(const Eigen::VectorXd& params, const SarimaOrder& o) {
  UnpackedParams u;
  u.phi = params.segment(0, o.p);
  u.theta = params.segment(o.p, o.q);
  u.Phi = params.segment(o.p + o.q, o.P);
  u.Theta = params.segment(o.p + o.q + o.P, o.Q);
  u.intercept = params(o.coef_count());
  return u;
}

}  // namespace

void SarimaOrder::validate() const {
  if (p < 0 || d < 0 || q < 0 || P < 0 || D < 0 || Q < 0) {
    throw InputError("sarima: orders must be non-negative");
  }
  if (m < 1) throw InputError("sarima: seasonal period must be at least 1");
  if (d + D > 3) throw InputError("sarima: d + D must not exceed 3");
  if (m == 1 && (P > 0 || D > 0 || Q > 0)) {
    throw InputError("sarima: seasonal orders require a period greater than 1");
  }
}

std::vector<double> difference(std::span<const double> x, int d, int D, int m) {
  if (d < 0 || D < 0 || m < 1) throw InputError("difference: bad orders");
  std::vector<double> v(x.begin(), x.end());
  for (int r = 0; r < d; ++r) {
    if (v.size() < 2) throw InputError("difference: series too short");
    for (std::size_t t = 0; t + 1 < v.size(); ++t) v[t] = v[t + 1] - v[t];
    v.pop_back();
  }
  const auto lag = static_cast<std::size_t>(m);
  for (int r = 0; r < D; ++r) {
    if (v.size() < lag + 1) throw InputError("difference: series too short");
    for (std::size_t t = 0; t + lag < v.size(); ++t) v[t] = v[t + lag] - v[t];
    v.resize(v.size() - lag);
  }
  return v;
}

std::vector<double> undifference(std::span<const double> w, std::span<const double> head, int d,
                                 int D, int m) {
  const auto need = static_cast<std::size_t>(d + m * D);
  if (head.size() != need) throw InputError("undifference: head must hold d + m*D values");

  // Forward-difference the head to recover the initial values of each level.
  std::vector<std::vector<double>> regular_heads;
  std::vector<double> h(head.begin(), head.end());
  for (int r = 0; r < d; ++r) {
    regular_heads.push_back(h);
    for (std::size_t t = 0; t + 1 < h.size(); ++t) h[t] = h[t + 1] - h[t];
    h.pop_back();
  }
  std::vector<std::vector<double>> seasonal_heads;
  for (int r = 0; r < D; ++r) {
    seasonal_heads.push_back(h);
    for (std::size_t t = 0; t + static_cast<std::size_t>(m) < h.size(); ++t) {
      h[t] = h[t + static_cast<std::size_t>(m)] - h[t];
    }
    h.resize(h.size() - static_cast<std::size_t>(m));
  }

  std::vector<double> v(w.begin(), w.end());
  for (int r = D - 1; r >= 0; --r) {
    const auto& sh = seasonal_heads[static_cast<std::size_t>(r)];
    std::vector<double> u(sh.begin(), sh.begin() + m);
    u.reserve(u.size() + v.size());
    for (std::size_t t = 0; t < v.size(); ++t) u.push_back(v[t] + u[t]);
    v = std::move(u);
  }
  for (int r = d - 1; r >= 0; --r) {
    const auto& rh = regular_heads[static_cast<std::size_t>(r)];
    std::vector<double> u;
    u.reserve(1 + v.size());
    u.push_back(rh[0]);
    for (double step : v) u.push_back(step + u.back());
    v = std::move(u);
  }
  return v;
}

AdfResult adf_test(std::span<const double> series, int max_lag) {
  if (max_lag < 0) throw InputError("adf: max_lag must be non-negative");
  const auto n = static_cast<Eigen::Index>(series.size());
  if (n < max_lag + 10) throw InputError("adf: series too short");
  if (population_variance(series) < kVarGuard) {
    // A constant series is trivially stationary.
    return {-std::numeric_limits<double>::infinity(), true};
  }

  // dy_t = c + g*y_{t-1} + sum_i b_i dy_{t-i}
  const Eigen::Index n_dy = n - 1;
  const Eigen::Index rows = n_dy - max_lag;
  const Eigen::Index cols = 2 + max_lag;
  if (rows <= cols + 2) throw InputError("adf: series too short");
  Eigen::MatrixXd x(rows, cols);
  Eigen::VectorXd b(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index t = max_lag + r;  // index into dy
    b(r) = series[static_cast<std::size_t>(t + 1)] - series[static_cast<std::size_t>(t)];
    x(r, 0) = 1.0;
    x(r, 1) = series[static_cast<std::size_t>(t)];
    for (int i = 1; i <= max_lag; ++i) {
      x(r, 1 + i) = series[static_cast<std::size_t>(t - i + 1)] - series[static_cast<std::size_t>(t - i)];
    }
  }

  const Eigen::MatrixXd xtx = x.transpose() * x;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
  if (ldlt.info() != Eigen::Success) {
    return {-std::numeric_limits<double>::infinity(), true};
  }
  const Eigen::VectorXd coef = ldlt.solve(x.transpose() * b);
  const Eigen::VectorXd resid = b - x * coef;
  const double s2 = resid.squaredNorm() / static_cast<double>(rows - cols);
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(cols);
  unit(1) = 1.0;
  const double var_g = s2 * unit.dot(ldlt.solve(unit));
  if (!(var_g > 0.0) || !std::isfinite(var_g)) {
    return {-std::numeric_limits<double>::infinity(), true};
  }
  const double stat = coef(1) / std::sqrt(var_g);
  return {stat, stat < mackinnon_cv(static_cast<double>(rows))};
}

int select_d(std::span<const double> series) {
  for (int d = 0; d <= 2; ++d) {
    const auto x = difference(series, d, 0, 1);
    if (x.size() < 20) throw InputError("select_d: series too short");
    if (population_variance(x) < kVarGuard) return d;
    const int lag = std::min(schwert_lag(x.size()),
                             static_cast<int>(x.size()) / 2 - 8);
    if (adf_test(x, std::max(0, lag)).reject) return d;
  }
  return 2;
}

double seasonal_stability_stat(std::span<const double> series, int m) {
  const auto n = series.size();
  if (m < 2) throw InputError("seasonal test: period must be at least 2");
  if (n < 2 * static_cast<std::size_t>(m)) throw InputError("seasonal test: series too short");

  const double mu = mean(series);
  std::vector<double> omega(static_cast<std::size_t>(m), 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    const double e = series[t] - mu;
    omega[t % static_cast<std::size_t>(m)] += e * e;
  }
  for (double& o : omega) o /= static_cast<double>(n);
  for (double o : omega) {
    if (o < kVarGuard) return 0.0;  // a silent season carries no evidence
  }

  std::vector<double> acc(static_cast<std::size_t>(m), 0.0);
  double stat = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    acc[t % static_cast<std::size_t>(m)] += series[t] - mu;
    for (std::size_t j = 0; j < static_cast<std::size_t>(m); ++j) {
      stat += acc[j] * acc[j] / omega[j];
    }
  }
  return stat / (static_cast<double>(n) * static_cast<double>(n));
}

double seasonal_critical_value(int m) {
  // 95th percentile under white noise, simulated (10k replications, n=500).
  static const std::map<int, double> kTable = {
      {2, 1.848},   {3, 2.775},   {4, 3.699},   {5, 4.441},  {6, 5.105},  {7, 5.830},
      {8, 6.474},   {9, 7.218},   {10, 7.906},  {11, 8.435}, {12, 9.076}, {13, 9.832},
      {14, 10.377}, {15, 10.964}, {16, 11.552}, {17, 12.224}, {18, 12.834},
      {19, 13.336}, {20, 14.048}, {21, 14.505}, {22, 15.110}, {23, 15.643}, {24, 16.387}};
  if (m < 2) throw InputError("seasonal test: period must be at least 2");
  const auto it = kTable.find(m);
  if (it != kTable.end()) return it->second;
  // Normal approximation of the sum of m squared-integral terms; slightly
  // conservative beyond the simulated table.
  return static_cast<double>(m) / 2.0 + 1.645 * std::sqrt(static_cast<double>(m) / 3.0);
}

int select_D(std::span<const double> series, int m, std::string* warning) {
  if (m < 2) return 0;
  if (series.size() < 2 * static_cast<std::size_t>(m)) {
    if (warning) {
      *warning = "seasonal test skipped: fewer than " + std::to_string(2 * m) +
                 " observations; assuming D=0";
    }
    return 0;
  }
  if (population_variance(series) < kVarGuard) return 0;
  return seasonal_stability_stat(series, m) > seasonal_critical_value(m) ? 1 : 0;
}

SarimaFit fit_css(std::span<const double> series, const SarimaOrder& order) {
  order.validate();
  const int k = order.coef_count() + 1;  // + intercept
  if (static_cast<int>(series.size()) <= k + order.m * order.D + order.d) {
    throw InputError("sarima: series too short for the requested order");
  }
  const std::vector<double> w = difference(series, order.d, order.D, order.m);
  const auto n = static_cast<Eigen::Index>(w.size());
  const Eigen::Index na = order.p + order.m * order.P;
  const Eigen::Index n_eff = n - na;
  if (n_eff < k + 2) throw InputError("sarima: series too short for the requested order");

  const auto objective = [&](const Eigen::VectorXd& params) {
    const auto u = unpack(params, order);
    const Eigen::VectorXd a = expand_poly(u.phi, u.Phi, order.m, -1.0);
    const Eigen::VectorXd b = expand_poly(u.theta, u.Theta, order.m, 1.0);
    return css_sse(w, a, b, u.intercept);
  };

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(k);
  x0(k - 1) = mean(w);
  const auto opt = nelder_mead(objective, x0, 0.1, 1e-8, 5000);
  if (!opt.converged) {
    throw FitError("sarima: no convergence after 5000 iterations (best sse " +
                   std::to_string(opt.value) + ")");
  }

  SarimaFit fit;
  fit.order = order;
  const auto u = unpack(opt.x, order);
  fit.phi = u.phi;
  fit.theta = u.theta;
  fit.Phi = u.Phi;
  fit.Theta = u.Theta;
  fit.intercept = u.intercept;
  fit.n_obs = n_eff;

  const Eigen::VectorXd a = expand_poly(fit.phi, fit.Phi, order.m, -1.0);
  const Eigen::VectorXd b = expand_poly(fit.theta, fit.Theta, order.m, 1.0);
  if (min_root_magnitude(-a) <= 1.0 + 1e-8) {
    throw FitError("sarima: non-stationary AR component");
  }
  if (min_root_magnitude(b) <= 1.0 + 1e-8) {
    throw FitError("sarima: non-invertible MA component");
  }

  const double sse = css_sse(w, a, b, fit.intercept);
  fit.sigma2 = sse / static_cast<double>(n_eff);
  if (!(fit.sigma2 > 0.0) || !std::isfinite(fit.sigma2)) {
    throw FitError("sarima: degenerate innovation variance");
  }
  fit.aic = static_cast<double>(n_eff) * std::log(fit.sigma2) + 2.0 * (k + 1);
  return fit;
}

SarimaFit stepwise_search(std::span<const double> series, int m) {
  if (m < 1) throw InputError("sarima: seasonal period must be at least 1");
  if (series.size() < 50) throw InputError("sarima: need at least 50 observations");

  const int D = m > 1 ? select_D(series, m) : 0;
  const std::vector<double> deseasoned = difference(series, 0, D, m);
  const int d = select_d(deseasoned);

  struct Key {
    int p, q, P, Q;
    bool operator<(const Key& o) const {
      return std::tie(p, q, P, Q) < std::tie(o.p, o.q, o.P, o.Q);
    }
  };
  std::map<Key, std::optional<SarimaFit>> cache;
  const auto evaluate = [&](int p, int q, int P, int Q) -> const std::optional<SarimaFit>& {
    const Key key{p, q, P, Q};
    const auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    SarimaOrder order{p, d, q, P, D, Q, m};
    std::optional<SarimaFit> fit;
    try {
      fit = fit_css(series, order);
    } catch (const FitError&) {
    } catch (const InputError&) {
    }
    return cache.emplace(key, std::move(fit)).first->second;
  };

  std::vector<Key> starts = {{2, 2, 1, 1}, {0, 0, 0, 0}, {1, 0, 1, 0}, {0, 1, 0, 1}};
  if (m == 1) {
    for (auto& s : starts) s.P = s.Q = 0;
  }
  std::optional<SarimaFit> best;
  for (const auto& s : starts) {
    const auto& fit = evaluate(s.p, s.q, s.P, s.Q);
    if (fit && (!best || fit->aic < best->aic)) best = fit;
  }
  if (!best) throw FitError("sarima: every starting model failed to fit");

  constexpr int kMaxMoves = 100;
  for (int move = 0; move < kMaxMoves; ++move) {
    const SarimaOrder cur = best->order;
    std::optional<SarimaFit> next;
    const auto consider = [&](int p, int q, int P, int Q) {
      if (p < 0 || p > 5 || q < 0 || q > 5 || P < 0 || P > 2 || Q < 0 || Q > 2) return;
      const auto& fit = evaluate(p, q, P, Q);
      if (fit && (!next || fit->aic < next->aic)) next = fit;
    };
    consider(cur.p - 1, cur.q, cur.P, cur.Q);
    consider(cur.p + 1, cur.q, cur.P, cur.Q);
    consider(cur.p, cur.q - 1, cur.P, cur.Q);
    consider(cur.p, cur.q + 1, cur.P, cur.Q);
    if (m > 1) {
      consider(cur.p, cur.q, cur.P - 1, cur.Q);
      consider(cur.p, cur.q, cur.P + 1, cur.Q);
      consider(cur.p, cur.q, cur.P, cur.Q - 1);
      consider(cur.p, cur.q, cur.P, cur.Q + 1);
    }
    if (next && next->aic < best->aic - 1e-10) {
      best = next;
    } else {
      break;
    }
  }
  return *best;
}

double one_step_forecast_mae(std::span<const double> series, const SarimaFit& fit) {
  const SarimaOrder& order = fit.order;
  order.validate();
  const std::vector<double> w = difference(series, order.d, order.D, order.m);
  const Eigen::VectorXd a = expand_poly(fit.phi, fit.Phi, order.m, -1.0);
  const Eigen::VectorXd b = expand_poly(fit.theta, fit.Theta, order.m, 1.0);
  if (static_cast<Eigen::Index>(w.size()) - a.size() < 1) {
    throw InputError("sarima: series too short for one-step forecasts");
  }
  std::vector<double> residuals;
  css_sse(w, a, b, fit.intercept, &residuals);
  double sum = 0.0;
  const auto start = static_cast<std::size_t>(a.size());
  for (std::size_t t = start; t < residuals.size(); ++t) sum += std::abs(residuals[t]);
  return sum / static_cast<double>(residuals.size() - start);
}

BaselineThresholds baseline_thresholds(const Eigen::MatrixXd& y, int m) {
  if (y.cols() != kNumLabPoints) throw InputError("baseline: expected 7 distillation points");
  BaselineThresholds out;
  std::vector<double> column(static_cast<std::size_t>(y.rows()));
  for (int j = 0; j < kNumLabPoints; ++j) {
    for (Eigen::Index r = 0; r < y.rows(); ++r) column[static_cast<std::size_t>(r)] = y(r, j);
    const SarimaFit fit = stepwise_search(column, m);
    const double mae = one_step_forecast_mae(column, fit);
    if (!(mae > 0.0)) throw FitError("baseline: degenerate threshold for point " + std::to_string(j));
    out.mae[static_cast<std::size_t>(j)] = mae;
    out.orders[static_cast<std::size_t>(j)] = fit.order;
  }
  return out;
}

}  // namespace softsense
