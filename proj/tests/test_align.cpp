#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <vector>

#include "softsense/align.hpp"
#include "softsense/synth.hpp"

namespace ss = softsense;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

ss::SensorTable make_sensors(const std::vector<std::int64_t>& ts,
                             const std::vector<std::string>& names,
                             const std::vector<std::vector<double>>& rows) {
  ss::SensorTable t;
  t.timestamps = ts;
  t.names = names;
  t.values.resize(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(names.size()));
  t.valid.resize(t.values.rows(), t.values.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < names.size(); ++c) {
      const double v = rows[r][c];
      t.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
      t.valid(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = !std::isnan(v);
    }
  }
  return t;
}

}  // namespace

TEST_CASE("standardization matches the worked example") {
  // [PAPER] {1,2,3} with population std: scaled to {-1.2247, 0, 1.2247}.
  Eigen::MatrixXd m(3, 1);
  m << 1.0, 2.0, 3.0;
  const std::vector<Eigen::Index> all = {0, 1, 2};
  const auto s = ss::fit_scaler(m, all);
  CHECK(s.mean(0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s.std(0) == doctest::Approx(0.816496580927726).epsilon(1e-14));
  const auto z = ss::apply_scaler(s, m);
  CHECK(z(0, 0) == doctest::Approx(-1.224744871391589).epsilon(1e-14));
  CHECK(z(1, 0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(z(2, 0) == doctest::Approx(1.224744871391589).epsilon(1e-14));
}

TEST_CASE("scaler round trips and rejects flat columns") {
  Eigen::MatrixXd m(4, 2);
  m << 1.0, -3.0, 2.5, 8.0, -1.0, 0.25, 7.0, 4.0;
  const std::vector<Eigen::Index> all = {0, 1, 2, 3};
  const auto s = ss::fit_scaler(m, all);
  const auto back = ss::invert_scaler(s, ss::apply_scaler(s, m));
  CHECK((back - m).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::MatrixXd flat(3, 2);
  flat << 1.0, 5.0, 2.0, 5.0, 3.0, 5.0;
  const std::vector<Eigen::Index> three = {0, 1, 2};
  CHECK_THROWS_WITH_AS(static_cast<void>(ss::fit_scaler(flat, three, {"T0", "PT"})),
                       "scaler: zero-variance column: PT", ss::InputError);
}

TEST_CASE("scaler can fit on a row subset") {
  Eigen::MatrixXd m(4, 1);
  m << 0.0, 10.0, 2.0, 4.0;
  const std::vector<Eigen::Index> subset = {0, 2, 3};  // mean 2, population std sqrt(8/3)
  const auto s = ss::fit_scaler(m, subset);
  CHECK(s.mean(0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s.std(0) == doctest::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("window average covers a backward half-open interval") {
  const auto sensors = make_sensors({60, 120, 180, 240},
                                    {"a", "b"},
                                    {{1.0, 10.0}, {2.0, 20.0}, {3.0, 30.0}, {4.0, 40.0}});
  // (120, 240] picks rows at 180 and 240.
  auto w = ss::window_average(sensors, 240, 120);
  REQUIRE(w.has_value());
  CHECK((*w)(0) == doctest::Approx(3.5).epsilon(1e-15));
  CHECK((*w)(1) == doctest::Approx(35.0).epsilon(1e-15));
  // The sample exactly at lab_ts - width is excluded, the one at lab_ts included.
  w = ss::window_average(sensors, 180, 60);
  REQUIRE(w.has_value());
  CHECK((*w)(0) == doctest::Approx(3.0).epsilon(1e-15));
  // A window before all samples is empty.
  CHECK_FALSE(ss::window_average(sensors, 30, 30).has_value());
}

TEST_CASE("window average skips invalid cells and excluded rows") {
  auto sensors = make_sensors({60, 120, 180},
                              {"a", "b"},
                              {{1.0, kNan}, {2.0, 20.0}, {3.0, 30.0}});
  auto w = ss::window_average(sensors, 180, 180);
  REQUIRE(w.has_value());
  CHECK((*w)(0) == doctest::Approx(2.0).epsilon(1e-15));  // (1+2+3)/3
  CHECK((*w)(1) == doctest::Approx(25.0).epsilon(1e-15));  // kNan cell skipped

  // Excluding the two valid "b" rows leaves that channel empty -> no sample.
  const std::vector<char> excluded = {0, 1, 1};
  CHECK_FALSE(ss::window_average(sensors, 180, 180, excluded).has_value());

  // A channel with no valid cell in the window empties the whole sample.
  sensors.valid(1, 1) = false;
  sensors.valid(2, 1) = false;
  CHECK_FALSE(ss::window_average(sensors, 180, 180).has_value());
}

TEST_CASE("split sizes follow floor(frac * n)") {
  // [DERIVED] floor(0.7 * 1206) = 844.
  const auto [train, test] = ss::split_train_test(1206, 0.7, 42);
  CHECK(train.size() == 844);
  CHECK(test.size() == 362);
  CHECK(std::is_sorted(train.begin(), train.end()));
  CHECK(std::is_sorted(test.begin(), test.end()));
  std::vector<char> seen(1206, 0);
  for (auto i : train) seen[static_cast<std::size_t>(i)] = 1;
  for (auto i : test) {
    CHECK(seen[static_cast<std::size_t>(i)] == 0);
    seen[static_cast<std::size_t>(i)] = 1;
  }
  CHECK(std::count(seen.begin(), seen.end(), 1) == 1206);

  const auto [t2, s2] = ss::split_train_test(1206, 0.7, 42);
  CHECK(t2 == train);
  const auto [t3, s3] = ss::split_train_test(1206, 0.7, 43);
  CHECK(t3 != train);

  const auto [t4, s4] = ss::split_train_test(10, 0.7, 1);
  CHECK(t4.size() == 7);
  CHECK(s4.size() == 3);
  CHECK_THROWS_AS(ss::split_train_test(1, 0.7, 1), ss::InputError);
  CHECK_THROWS_AS(ss::split_train_test(10, 1.0, 1), ss::InputError);
}

TEST_CASE("alignment builds window means per lab row") {
  // Two "days" of three minutes each; lab rows at the day ends.
  const auto sensors = make_sensors({60, 120, 180, 240, 300, 360},
                                    {"a", "b"},
                                    {{1.0, 10.0},
                                     {2.0, 20.0},
                                     {3.0, 30.0},
                                     {7.0, 70.0},
                                     {8.0, 80.0},
                                     {9.0, 90.0}});
  ss::LabTable lab;
  lab.timestamps = {180, 360};
  lab.values.resize(2, ss::kNumLabPoints);
  lab.valid.resize(2, ss::kNumLabPoints);
  for (int j = 0; j < ss::kNumLabPoints; ++j) {
    lab.values(0, j) = 200.0 + j;
    lab.values(1, j) = 210.0 + j;
    lab.valid(0, j) = lab.valid(1, j) = true;
  }

  ss::AlignConfig cfg;
  cfg.window_seconds = 180;
  cfg.train_frac = 0.5;
  cfg.scaler_fit_all = true;
  const auto ds = ss::align_dataset(sensors, lab, cfg);
  CHECK(ds.X.rows() == 2);
  CHECK(ds.X(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(ds.X(0, 1) == doctest::Approx(20.0).epsilon(1e-15));
  CHECK(ds.X(1, 0) == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(ds.X(1, 1) == doctest::Approx(80.0).epsilon(1e-15));
  CHECK(ds.Y(0, 0) == 200.0);
  CHECK(ds.Y(1, 6) == 216.0);
  CHECK(ds.feature_names == std::vector<std::string>({"a", "b"}));
  CHECK(ds.timestamps == std::vector<std::int64_t>({180, 360}));
  CHECK(ds.dropped_empty_windows == 0);
  CHECK(ds.train_idx.size() == 1);
  CHECK(ds.test_idx.size() == 1);
  // scaler_fit_all: x mean over both rows.
  CHECK(ds.x_scaler.mean(0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(ds.y_scaler.mean(0) == doctest::Approx(205.0).epsilon(1e-15));
}

TEST_CASE("lab rows with empty windows are dropped and counted") {
  const auto sensors = make_sensors({60, 120}, {"a"}, {{1.0}, {3.0}});
  ss::LabTable lab;
  lab.timestamps = {120, 100000};
  lab.values.resize(2, ss::kNumLabPoints);
  lab.values.setConstant(250.0);
  lab.valid.resize(2, ss::kNumLabPoints);
  lab.valid.setConstant(true);

  ss::AlignConfig cfg;
  cfg.window_seconds = 120;
  cfg.scaler_fit_all = true;
  // Only one sample row survives; splitting needs at least 2.
  CHECK_THROWS_AS(ss::align_dataset(sensors, lab, cfg), ss::InputError);

  // Add a third lab row with a window so the split works, then count drops.
  lab.timestamps = {100, 120, 100000};
  lab.values.resize(3, ss::kNumLabPoints);
  lab.values.setConstant(250.0);
  lab.values.row(1).setConstant(260.0);
  lab.valid.resize(3, ss::kNumLabPoints);
  lab.valid.setConstant(true);
  cfg.train_frac = 0.5;
  const auto ds = ss::align_dataset(sensors, lab, cfg);
  CHECK(ds.X.rows() == 2);
  CHECK(ds.dropped_empty_windows == 1);
  CHECK(ds.timestamps == std::vector<std::int64_t>({100, 120}));
}

TEST_CASE("chronological split takes the first rows as train") {
  ss::SynthSpec spec;
  spec.n_days = 40;
  spec.day_minutes = 10;
  spec.null_rate = 0.0;
  spec.dup_rate = 0.0;
  spec.lab_outlier_rate = 0.0;
  spec.short_outlier_rate = 0.0;
  spec.long_periods = {};
  const auto out = ss::generate_synthetic(spec);

  ss::AlignConfig cfg;
  cfg.window_seconds = 600;
  cfg.chronological_split = true;
  const auto ds = ss::align_dataset(out.sensors, out.lab, cfg);
  CHECK(ds.X.rows() == 40);
  REQUIRE(ds.train_idx.size() == 28);  // floor(0.7 * 40)
  CHECK(ds.train_idx.front() == 0);
  CHECK(ds.train_idx.back() == 27);
  CHECK(ds.test_idx.front() == 28);
  CHECK(ds.test_idx.back() == 39);

  // Scalers fit on the train rows only by default.
  double m = 0.0;
  for (auto r : ds.train_idx) m += ds.X(r, 0);
  m /= static_cast<double>(ds.train_idx.size());
  CHECK(ds.x_scaler.mean(0) == doctest::Approx(m).epsilon(1e-14));
}

TEST_CASE("sensor rows inside excluded periods do not enter window means") {
  const auto sensors = make_sensors({60, 120, 180}, {"a"}, {{1.0}, {100.0}, {3.0}});
  ss::LabTable lab;
  lab.timestamps = {180, 240};
  lab.values.resize(2, ss::kNumLabPoints);
  lab.values.setConstant(250.0);
  lab.values.row(1).setConstant(260.0);
  lab.valid.resize(2, ss::kNumLabPoints);
  lab.valid.setConstant(true);

  ss::AlignConfig cfg;
  cfg.window_seconds = 180;
  cfg.train_frac = 0.5;
  cfg.scaler_fit_all = true;
  const auto ds = ss::align_dataset(sensors, lab, cfg, {{100, 130}});
  CHECK(ds.X(0, 0) == doctest::Approx(2.0).epsilon(1e-15));  // (1 + 3) / 2, row at 120 excluded
}

TEST_CASE("aligned datasets round trip through the binary format") {
  ss::SynthSpec spec;
  spec.n_days = 30;
  spec.day_minutes = 10;
  spec.null_rate = 0.0;
  spec.dup_rate = 0.0;
  spec.lab_outlier_rate = 0.0;
  spec.short_outlier_rate = 0.0;
  spec.long_periods = {};
  const auto out = ss::generate_synthetic(spec);
  ss::AlignConfig cfg;
  cfg.window_seconds = 600;
  const auto ds = ss::align_dataset(out.sensors, out.lab, cfg);

  const std::string path = "align_test_tmp.bin";
  ss::save_aligned(ds, path);
  const auto back = ss::load_aligned(path);
  CHECK(back.X == ds.X);
  CHECK(back.Y == ds.Y);
  CHECK(back.timestamps == ds.timestamps);
  CHECK(back.feature_names == ds.feature_names);
  CHECK(back.x_scaler.mean == ds.x_scaler.mean);
  CHECK(back.x_scaler.std == ds.x_scaler.std);
  CHECK(back.y_scaler.mean == ds.y_scaler.mean);
  CHECK(back.y_scaler.std == ds.y_scaler.std);
  CHECK(back.train_idx == ds.train_idx);
  CHECK(back.test_idx == ds.test_idx);
  CHECK(back.dropped_empty_windows == ds.dropped_empty_windows);

  // Byte-stable: saving the same dataset twice yields identical files.
  std::ifstream in(path, std::ios::binary);
  std::string first((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  ss::save_aligned(ds, path);
  std::ifstream in2(path, std::ios::binary);
  std::string second((std::istreambuf_iterator<char>(in2)), std::istreambuf_iterator<char>());
  in2.close();
  CHECK(first == second);
  CHECK(!first.empty());
  CHECK(first.substr(0, 4) == "SSAD");

  // Truncated and corrupted files are rejected.
  std::ofstream trunc(path, std::ios::binary);
  trunc.write(first.data(), 40);
  trunc.close();
  CHECK_THROWS_AS(ss::load_aligned(path), ss::InputError);
  std::ofstream bad(path, std::ios::binary);
  bad.write("NOPE", 4);
  bad.close();
  CHECK_THROWS_AS(ss::load_aligned(path), ss::InputError);
  std::remove(path.c_str());
  CHECK_THROWS_WITH_AS(static_cast<void>(ss::load_aligned(path)),
                       ("missing aligned dataset: " + path).c_str(), ss::InputError);
}

TEST_CASE("alignment refuses lab rows with missing cells") {
  const auto sensors = make_sensors({60, 120}, {"a"}, {{1.0}, {3.0}});
  ss::LabTable lab;
  lab.timestamps = {60, 120};
  lab.values.resize(2, ss::kNumLabPoints);
  lab.values.setConstant(250.0);
  lab.valid.resize(2, ss::kNumLabPoints);
  lab.valid.setConstant(true);
  lab.valid(1, 3) = false;
  ss::AlignConfig cfg;
  cfg.window_seconds = 60;
  cfg.train_frac = 0.5;
  CHECK_THROWS_AS(ss::align_dataset(sensors, lab, cfg), ss::InputError);
}
