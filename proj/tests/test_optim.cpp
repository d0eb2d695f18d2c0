#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "softsense/optim.hpp"

namespace ss = softsense;

TEST_CASE("quadratic bowl converges to its minimum") {
  const auto f = [](const Eigen::VectorXd& x) {
    return (x(0) - 3.0) * (x(0) - 3.0) + (x(1) + 1.0) * (x(1) + 1.0);
  };
  const auto r = ss::nelder_mead(f, Eigen::Vector2d(0.0, 0.0), 0.5, 1e-12, 5000);
  CHECK(r.converged);
  CHECK(r.x(0) == doctest::Approx(3.0).epsilon(1e-5));
  CHECK(r.x(1) == doctest::Approx(-1.0).epsilon(1e-5));
  CHECK(r.value < 1e-10);
}

TEST_CASE("rosenbrock valley is followed to the optimum") {
  // [DERIVED] global minimum of the Rosenbrock function is (1, 1) with value 0.
  const auto f = [](const Eigen::VectorXd& x) {
    const double a = 1.0 - x(0);
    const double b = x(1) - x(0) * x(0);
    return a * a + 100.0 * b * b;
  };
  const auto r = ss::nelder_mead(f, Eigen::Vector2d(-1.2, 1.0), 0.5, 1e-14, 10000);
  CHECK(r.converged);
  CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.x(1) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("one-dimensional problems work") {
  const auto f = [](const Eigen::VectorXd& x) { return std::cosh(x(0) - 2.0); };
  Eigen::VectorXd x0(1);
  x0 << -5.0;
  const auto r = ss::nelder_mead(f, x0, 1.0, 1e-12, 5000);
  CHECK(r.converged);
  CHECK(r.x(0) == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("iteration budget is honored") {
  const auto f = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(4, 100.0);
  const auto r = ss::nelder_mead(f, x0, 0.1, 1e-16, 3);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 3);
  // The best point never regresses past the start.
  CHECK(r.value <= f(x0));
}

TEST_CASE("invalid arguments are rejected") {
  const auto f = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
  CHECK_THROWS_AS(ss::nelder_mead(f, Eigen::VectorXd(), 0.1, 1e-8, 10), std::invalid_argument);
  CHECK_THROWS_AS(ss::nelder_mead(f, Eigen::Vector2d(0, 0), 0.0, 1e-8, 10), std::invalid_argument);
  CHECK_THROWS_AS(ss::nelder_mead(f, Eigen::Vector2d(0, 0), 0.1, 0.0, 10), std::invalid_argument);
}
