#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "softsense/csv.hpp"

namespace ss = softsense;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("csv_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
  void write(const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
  }
};

}  // namespace

TEST_CASE("sensor csv basics: header, missing tokens, column order") {
  TempFile f("sensor_basic.csv");
  f.write(
      "timestamp,T0,T3,PT\n"
      "60,1.5,2.5,3.5\n"
      "120,,nan,4.5\n"
      "180,7.25,NA,null\n");
  auto t = ss::parse_sensor_csv(f.path);
  CHECK(t.names == std::vector<std::string>{"T0", "T3", "PT"});
  CHECK(t.rows() == 3);
  CHECK(t.timestamps == std::vector<std::int64_t>{60, 120, 180});
  CHECK(t.values(0, 0) == 1.5);
  CHECK(t.values(2, 0) == 7.25);
  CHECK_FALSE(t.valid(1, 0));
  CHECK_FALSE(t.valid(1, 1));
  CHECK(t.valid(1, 2));
  CHECK_FALSE(t.valid(2, 1));
  CHECK_FALSE(t.valid(2, 2));
  CHECK(std::isnan(t.values(1, 0)));
}

TEST_CASE("sensor csv honors a column map and ignores unlisted columns") {
  TempFile f("sensor_map.csv");
  f.write(
      "junk,ts,B,A\n"
      "9,60,2.0,1.0\n"
      "9,120,4.0,3.0\n");
  ss::SensorColumnMap spec;
  spec.timestamp_column = "ts";
  spec.sensor_columns = {"A", "B"};
  auto t = ss::parse_sensor_csv(f.path, spec);
  CHECK(t.names == std::vector<std::string>{"A", "B"});
  CHECK(t.values(0, 0) == 1.0);
  CHECK(t.values(0, 1) == 2.0);

  spec.sensor_columns = {"C"};
  CHECK_THROWS_AS(ss::parse_sensor_csv(f.path, spec), ss::InputError);
}

TEST_CASE("sensor csv sorts rows by timestamp and rejects duplicates") {
  TempFile f("sensor_sort.csv");
  f.write(
      "timestamp,A\n"
      "120,2.0\n"
      "60,1.0\n");
  auto t = ss::parse_sensor_csv(f.path);
  CHECK(t.timestamps == std::vector<std::int64_t>{60, 120});
  CHECK(t.values(0, 0) == 1.0);

  TempFile g("sensor_dup.csv");
  g.write(
      "timestamp,A\n"
      "60,1.0\n"
      "60,2.0\n");
  CHECK_THROWS(ss::parse_sensor_csv(g.path));
}

TEST_CASE("rfc4180 quoting: embedded commas, quotes and newlines") {
  TempFile f("quoted.csv");
  f.write(
      "timestamp,\"name, with comma\",\"say \"\"hi\"\"\"\n"
      "60,1.0,2.0\n");
  auto t = ss::parse_sensor_csv(f.path);
  CHECK(t.names == std::vector<std::string>{"name, with comma", "say \"hi\""});

  TempFile g("quoted_nl.csv");
  g.write("timestamp,\"two\nlines\"\r\n60,3.5\r\n");
  auto u = ss::parse_sensor_csv(g.path);
  CHECK(u.names == std::vector<std::string>{"two\nlines"});
  CHECK(u.values(0, 0) == 3.5);
}

TEST_CASE("malformed sensor csv raises InputError") {
  TempFile f("bad.csv");
  f.write("timestamp,A\n60,1.0,9\n");  // extra field
  CHECK_THROWS_AS(ss::parse_sensor_csv(f.path), ss::InputError);

  f.write("timestamp,A\nsixty,1.0\n");  // bad timestamp
  CHECK_THROWS_AS(ss::parse_sensor_csv(f.path), ss::InputError);

  f.write("timestamp,A\n60,1.0.9\n");  // bad number
  CHECK_THROWS_AS(ss::parse_sensor_csv(f.path), ss::InputError);

  CHECK_THROWS_AS(ss::parse_sensor_csv("no_such_file.csv"), ss::InputError);
}

TEST_CASE("lab csv requires 8 columns and maps zeros to missing") {
  TempFile f("lab.csv");
  f.write(
      "timestamp,p2,p10,p30,p50,p70,p90,p100\n"
      "0,100.5,120.5,150.25,170,190,220,240\n"
      "86400,100.5,0,150.25,170,190,220,240\n"
      "172800,100.5,120.5,,170,190,220,240\n");
  auto t = ss::parse_lab_csv(f.path);
  CHECK(t.rows() == 3);
  CHECK(t.row_fully_valid(0));
  CHECK_FALSE(t.valid(1, 1));  // exact zero treated as missing
  CHECK(std::isnan(t.values(1, 1)));
  CHECK_FALSE(t.valid(2, 2));

  TempFile g("lab_short.csv");
  g.write("timestamp,p2,p10\n0,1,2\n");
  CHECK_THROWS_AS(ss::parse_lab_csv(g.path), ss::InputError);
}

TEST_CASE("sensor csv round-trips bit-exactly") {
  TempFile f("rt_in.csv");
  f.write(
      "timestamp,A,B\n"
      "60,0.1,1e300\n"
      "120,-2.5000000000000004,\n"
      "180,3.141592653589793,6.02e23\n");
  auto t = ss::parse_sensor_csv(f.path);
  TempFile g("rt_out.csv");
  ss::write_sensor_csv(t, g.path);
  auto u = ss::parse_sensor_csv(g.path);
  REQUIRE(u.rows() == t.rows());
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    for (Eigen::Index j = 0; j < t.cols(); ++j) {
      CHECK(u.valid(i, j) == t.valid(i, j));
      if (t.valid(i, j)) {
        // Bit-exact: shortest round-trip formatting must reproduce the value.
        CHECK(u.values(i, j) == t.values(i, j));
      }
    }
  }
}

TEST_CASE("lab csv round-trips bit-exactly including invalid cells") {
  ss::LabTable t;
  t.timestamps = {0, 86400};
  t.values.resize(2, 7);
  t.values << 100.1, 120.2, 150.3, 170.4, 190.5, 220.6, 240.7,
      101.0 / 3.0, 121.0, 151.0, 171.0, 191.0, 221.0, 241.0;
  t.valid = ss::BoolMask::Constant(2, 7, true);
  t.valid(1, 4) = false;

  TempFile f("lab_rt.csv");
  ss::write_lab_csv(t, f.path);
  auto u = ss::parse_lab_csv(f.path);
  REQUIRE(u.rows() == 2);
  CHECK(u.values(1, 0) == 101.0 / 3.0);
  CHECK_FALSE(u.valid(1, 4));
  for (int k = 0; k < 7; ++k) {
    if (k == 4) continue;
    CHECK(u.values(1, k) == t.values(1, k));
  }
}

TEST_CASE("format_double emits shortest round-trip strings") {
  CHECK(ss::format_double(0.1) == "0.1");
  CHECK(ss::format_double(-2.5) == "-2.5");
  CHECK(ss::format_double(1e300) == "1e+300");
  CHECK(ss::format_double(3.0) == "3");
}
