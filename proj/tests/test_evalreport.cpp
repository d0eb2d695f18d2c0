#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <vector>

#include "softsense/evalreport.hpp"
#include "softsense/rng.hpp"

namespace ss = softsense;

TEST_CASE("mae per point is the column mean of absolute errors") {
  Eigen::MatrixXd pred(2, 2), target(2, 2);
  pred << 1, 2, 3, 4;
  target << 0, 0, 0, 0;
  const Eigen::VectorXd mae = ss::mae_per_point(pred, target);
  CHECK(mae(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(mae(1) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(ss::mae_per_point(pred, Eigen::MatrixXd::Zero(3, 2)), ss::InputError);
  CHECK_THROWS_AS(ss::mae_per_point(Eigen::MatrixXd(0, 2), Eigen::MatrixXd(0, 2)), ss::InputError);
}

TEST_CASE("threshold check is strict") {
  Eigen::VectorXd mae = Eigen::VectorXd::Constant(ss::kNumLabPoints, 1.0);
  std::array<double, ss::kNumLabPoints> thr{};
  thr.fill(2.0);
  auto check = ss::threshold_check(mae, thr);
  CHECK(check.all_pass);

  thr[3] = 1.0;  // equality must fail
  check = ss::threshold_check(mae, thr);
  CHECK_FALSE(check.all_pass);
  CHECK_FALSE(check.point_pass[3]);
  CHECK(check.point_pass[0]);
  CHECK_THROWS_AS(ss::threshold_check(Eigen::VectorXd::Ones(3), thr), ss::InputError);
}

TEST_CASE("confidence interval matches hand computation") {
  // [DERIVED] errors 1,2,3: mean 2, sample std 1, half width 1.959964, and
  // nothing falls strictly outside.
  Eigen::MatrixXd e(3, 1);
  e << 1, 2, 3;
  const auto ci = ss::ci_analysis(e);
  CHECK(ci.mean == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ci.half_width == doctest::Approx(1.959964).epsilon(1e-12));
  CHECK(ci.frac_outside == 0.0);
  CHECK(ci.point_mean(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ci.point_half_width(0) == doctest::Approx(1.959964).epsilon(1e-12));
}

TEST_CASE("a far outlier lands outside its interval") {
  // [DERIVED] nine zeros and one 100: mean 10, sample var 1000, half width
  // 61.98; only the outlier is outside, so the fraction is 0.1.
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(10, 1);
  e(9, 0) = 100.0;
  const auto ci = ss::ci_analysis(e);
  CHECK(ci.mean == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(ci.half_width == doctest::Approx(1.959964 * std::sqrt(1000.0)).epsilon(1e-12));
  CHECK(ci.frac_outside == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("constant errors give a zero-width interval containing everything") {
  const auto ci = ss::ci_analysis(Eigen::MatrixXd::Constant(8, 2, 0.75));
  CHECK(ci.mean == 0.75);
  CHECK(ci.half_width == 0.0);
  CHECK(ci.frac_outside == 0.0);
  CHECK(ci.point_frac_outside(0) == 0.0);
  CHECK(ci.point_frac_outside(1) == 0.0);
}

TEST_CASE("pooled statistics cover every column") {
  Eigen::MatrixXd e(2, 2);
  e << 1, 3, 1, 3;
  const auto ci = ss::ci_analysis(e);
  // [DERIVED] pooled values 1,1,3,3: mean 2, sample var 4/3.
  CHECK(ci.mean == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ci.half_width == doctest::Approx(1.959964 * std::sqrt(4.0 / 3.0)).epsilon(1e-12));
  CHECK(ci.point_mean(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ci.point_half_width(0) == 0.0);
  CHECK_THROWS_AS(ss::ci_analysis(Eigen::MatrixXd(0, 2)), ss::InputError);
}

TEST_CASE("gaussian errors leave about five percent outside") {
  // [DERIVED] 20k standard normal draws: the fraction strictly outside
  // mean +- 1.959964 std stays within 0.04..0.06.
  ss::Rng rng(17);
  Eigen::MatrixXd e(20000, 1);
  for (Eigen::Index i = 0; i < e.rows(); ++i) e(i, 0) = rng.normal();
  const auto ci = ss::ci_analysis(e);
  CHECK(ci.frac_outside > 0.04);
  CHECK(ci.frac_outside < 0.06);
}

TEST_CASE("histogram bins partition the value range") {
  std::vector<double> values;
  for (int i = 0; i < 30; ++i) values.push_back(static_cast<double>(i));
  const auto h = ss::histogram(values, 30);
  CHECK(h.lo == 0.0);
  CHECK(h.hi == 29.0);
  REQUIRE(h.counts.size() == 30);
  for (auto c : h.counts) CHECK(c == 1);  // the maximum goes into the last bin

  std::int64_t total = 0;
  for (auto c : ss::histogram(values, 7).counts) total += c;
  CHECK(total == 30);

  const auto flat = ss::histogram(std::vector<double>{2.5, 2.5, 2.5}, 5);
  CHECK(flat.lo == flat.hi);
  CHECK(flat.counts[0] == 3);
  CHECK_THROWS_AS(ss::histogram(std::vector<double>{}, 5), ss::InputError);
  CHECK_THROWS_AS(ss::histogram(values, 0), ss::InputError);
}

TEST_CASE("histogram csv has a bin_start column") {
  // [DERIVED] 0,1,2,3 into 2 bins of width 1.5: 0 and 1 left, 2 and 3 right.
  const auto h = ss::histogram(std::vector<double>{0, 1, 2, 3}, 2);
  const std::string path = "eval_test_hist.csv";
  ss::write_histogram_csv(h, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "bin_start,count");
  std::getline(in, line);
  CHECK(line == "0,2");
  std::getline(in, line);
  CHECK(line == "1.5,2");
  CHECK_FALSE(std::getline(in, line));
}
