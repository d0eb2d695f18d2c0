#include "softsense/align.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "softsense/rng.hpp"

namespace softsense {

Scaler fit_scaler(const Eigen::MatrixXd& m, std::span<const Eigen::Index> fit_rows,
                  const std::vector<std::string>& names) {
  if (fit_rows.empty()) throw InputError("scaler: no rows to fit on");
  Scaler s;
  s.mean = Eigen::VectorXd::Zero(m.cols());
  s.std = Eigen::VectorXd::Zero(m.cols());
  for (Eigen::Index r : fit_rows) s.mean += m.row(r).transpose();
  s.mean /= static_cast<double>(fit_rows.size());
  for (Eigen::Index r : fit_rows) {
    s.std += (m.row(r).transpose() - s.mean).array().square().matrix();
  }
  s.std = (s.std / static_cast<double>(fit_rows.size())).array().sqrt();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (s.std(j) <= 0.0) {
      const std::string label = j < static_cast<Eigen::Index>(names.size())
                                    ? names[static_cast<std::size_t>(j)]
                                    : "column " + std::to_string(j);
      throw InputError("scaler: zero-variance column: " + label);
    }
  }
  return s;
}

Eigen::MatrixXd apply_scaler(const Scaler& s, const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out = m.rowwise() - s.mean.transpose();
  for (Eigen::Index j = 0; j < out.cols(); ++j) out.col(j) /= s.std(j);
  return out;
}

Eigen::MatrixXd invert_scaler(const Scaler& s, const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out = m;
  for (Eigen::Index j = 0; j < out.cols(); ++j) out.col(j) *= s.std(j);
  return out.rowwise() + s.mean.transpose();
}

std::optional<Eigen::VectorXd> window_average(const SensorTable& sensors, std::int64_t lab_ts,
                                              std::int64_t width_seconds,
                                              const std::vector<char>& excluded) {
  const auto& ts = sensors.timestamps;
  // Half-open window (lab_ts - width, lab_ts].
  const auto lo = std::upper_bound(ts.begin(), ts.end(), lab_ts - width_seconds);
  const auto hi = std::upper_bound(ts.begin(), ts.end(), lab_ts);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(sensors.cols());
  Eigen::VectorXd count = Eigen::VectorXd::Zero(sensors.cols());
  for (auto it = lo; it != hi; ++it) {
    const auto r = static_cast<Eigen::Index>(it - ts.begin());
    if (!excluded.empty() && excluded[static_cast<std::size_t>(r)]) continue;
    for (Eigen::Index j = 0; j < sensors.cols(); ++j) {
      if (!sensors.valid(r, j)) continue;
      sum(j) += sensors.values(r, j);
      count(j) += 1.0;
    }
  }
  if ((count.array() == 0.0).any()) return std::nullopt;
  return (sum.array() / count.array()).matrix();
}

std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> split_train_test(
    Eigen::Index n, double frac, std::uint64_t seed) {
  if (n < 2) throw InputError("split: need at least 2 samples");
  if (!(frac > 0.0 && frac < 1.0)) throw InputError("split: frac must lie in (0, 1)");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  Rng rng(seed ^ fnv1a64("align.split"));
  rng.shuffle(idx);
  const auto n_train = static_cast<std::size_t>(std::floor(frac * static_cast<double>(n)));
  std::vector<Eigen::Index> train(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<Eigen::Index> test(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= m.rows()) throw InputError("select_rows: index out of range");
    out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  }
  return out;
}

void AlignedDataset::check_invariants() const {
  if (X.rows() != Y.rows() || X.rows() != static_cast<Eigen::Index>(timestamps.size())) {
    throw std::runtime_error("aligned dataset: row mismatch");
  }
  if (Y.cols() != kNumLabPoints) throw std::runtime_error("aligned dataset: expected 7 outputs");
  if (X.cols() != static_cast<Eigen::Index>(feature_names.size())) {
    throw std::runtime_error("aligned dataset: feature name mismatch");
  }
  if (static_cast<Eigen::Index>(train_idx.size() + test_idx.size()) != X.rows()) {
    throw std::runtime_error("aligned dataset: split does not cover all rows");
  }
  std::vector<char> seen(static_cast<std::size_t>(X.rows()), 0);
  for (const auto& part : {train_idx, test_idx}) {
    for (Eigen::Index i : part) {
      if (i < 0 || i >= X.rows() || seen[static_cast<std::size_t>(i)]) {
        throw std::runtime_error("aligned dataset: split indices invalid");
      }
      seen[static_cast<std::size_t>(i)] = 1;
    }
  }
}

AlignedDataset align_dataset(const SensorTable& sensors, const LabTable& lab,
                             const AlignConfig& cfg,
                             const std::vector<std::pair<std::int64_t, std::int64_t>>&
                                 sensor_exclude_ts) {
  sensors.check_invariants();
  lab.check_invariants();

  std::vector<char> excluded;
  if (!sensor_exclude_ts.empty()) {
    excluded.assign(static_cast<std::size_t>(sensors.rows()), 0);
    for (std::size_t r = 0; r < sensors.timestamps.size(); ++r) {
      const std::int64_t ts = sensors.timestamps[r];
      for (const auto& [s, e] : sensor_exclude_ts) {
        if (ts >= s && ts <= e) {
          excluded[r] = 1;
          break;
        }
      }
    }
  }

  AlignedDataset out;
  out.feature_names = sensors.names;
  std::vector<Eigen::VectorXd> rows;
  std::vector<Eigen::Index> lab_rows;
  for (Eigen::Index r = 0; r < lab.rows(); ++r) {
    auto feature = window_average(sensors, lab.timestamps[static_cast<std::size_t>(r)],
                                  cfg.window_seconds, excluded);
    if (!feature) {
      ++out.dropped_empty_windows;
      continue;
    }
    rows.push_back(std::move(*feature));
    lab_rows.push_back(r);
  }
  if (rows.empty()) throw InputError("alignment produced no samples");

  const auto n = static_cast<Eigen::Index>(rows.size());
  out.X.resize(n, sensors.cols());
  out.Y.resize(n, kNumLabPoints);
  out.timestamps.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    out.X.row(i) = rows[static_cast<std::size_t>(i)].transpose();
    const Eigen::Index r = lab_rows[static_cast<std::size_t>(i)];
    for (int j = 0; j < kNumLabPoints; ++j) {
      if (!lab.valid(r, j)) throw InputError("alignment requires fully valid lab rows");
      out.Y(i, j) = lab.values(r, j);
    }
    out.timestamps.push_back(lab.timestamps[static_cast<std::size_t>(r)]);
  }

  if (cfg.chronological_split) {
    const auto n_train = static_cast<Eigen::Index>(
        std::floor(cfg.train_frac * static_cast<double>(n)));
    if (n_train < 1 || n_train >= n) throw InputError("split: degenerate chronological split");
    for (Eigen::Index i = 0; i < n; ++i) {
      (i < n_train ? out.train_idx : out.test_idx).push_back(i);
    }
  } else {
    std::tie(out.train_idx, out.test_idx) = split_train_test(n, cfg.train_frac, cfg.seed);
  }

  std::vector<Eigen::Index> fit_rows = out.train_idx;
  if (cfg.scaler_fit_all) {
    fit_rows.resize(static_cast<std::size_t>(n));
    std::iota(fit_rows.begin(), fit_rows.end(), Eigen::Index{0});
  }
  out.x_scaler = fit_scaler(out.X, fit_rows, out.feature_names);
  std::vector<std::string> point_names;
  for (int pt : kLabPoints) point_names.push_back("p" + std::to_string(pt));
  out.y_scaler = fit_scaler(out.Y, fit_rows, point_names);

  out.check_invariants();
  return out;
}

namespace {

void write_bytes(std::ofstream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_bytes(std::ifstream& in, void* p, std::size_t n, const std::string& path) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (in.gcount() != static_cast<std::streamsize>(n)) {
    throw InputError(path + ": truncated aligned dataset");
  }
}

void write_u32(std::ofstream& out, std::uint32_t v) { write_bytes(out, &v, 4); }
void write_i64(std::ofstream& out, std::int64_t v) { write_bytes(out, &v, 8); }

std::uint32_t read_u32(std::ifstream& in, const std::string& path) {
  std::uint32_t v = 0;
  read_bytes(in, &v, 4, path);
  return v;
}
std::int64_t read_i64(std::ifstream& in, const std::string& path) {
  std::int64_t v = 0;
  read_bytes(in, &v, 8, path);
  return v;
}

void write_matrix(std::ofstream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      write_bytes(out, &v, 8);
    }
  }
}

void read_matrix(std::ifstream& in, Eigen::MatrixXd& m, const std::string& path) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      read_bytes(in, &m(i, j), 8, path);
    }
  }
}

void write_vector(std::ofstream& out, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double x = v(i);
    write_bytes(out, &x, 8);
  }
}

void read_vector(std::ifstream& in, Eigen::VectorXd& v, const std::string& path) {
  for (Eigen::Index i = 0; i < v.size(); ++i) read_bytes(in, &v(i), 8, path);
}

void write_index_list(std::ofstream& out, const std::vector<Eigen::Index>& v) {
  write_i64(out, static_cast<std::int64_t>(v.size()));
  for (Eigen::Index i : v) write_i64(out, static_cast<std::int64_t>(i));
}

std::vector<Eigen::Index> read_index_list(std::ifstream& in, const std::string& path) {
  const std::int64_t n = read_i64(in, path);
  if (n < 0) throw InputError(path + ": negative list length");
  std::vector<Eigen::Index> v(static_cast<std::size_t>(n));
  for (auto& i : v) i = static_cast<Eigen::Index>(read_i64(in, path));
  return v;
}

}  // namespace

void save_aligned(const AlignedDataset& data, const std::string& path) {
  data.check_invariants();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open file for writing: " + path);
  out.write("SSAD", 4);
  write_u32(out, 1);  // version
  write_i64(out, static_cast<std::int64_t>(data.X.rows()));
  write_u32(out, static_cast<std::uint32_t>(data.X.cols()));
  write_u32(out, static_cast<std::uint32_t>(data.Y.cols()));
  for (const std::string& name : data.feature_names) {
    write_u32(out, static_cast<std::uint32_t>(name.size()));
    write_bytes(out, name.data(), name.size());
  }
  for (std::int64_t ts : data.timestamps) write_i64(out, ts);
  write_matrix(out, data.X);
  write_matrix(out, data.Y);
  write_vector(out, data.x_scaler.mean);
  write_vector(out, data.x_scaler.std);
  write_vector(out, data.y_scaler.mean);
  write_vector(out, data.y_scaler.std);
  write_index_list(out, data.train_idx);
  write_index_list(out, data.test_idx);
  write_i64(out, data.dropped_empty_windows);
  if (!out) throw InputError("write failed: " + path);
}

AlignedDataset load_aligned(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("missing aligned dataset: " + path);
  char magic[4] = {};
  read_bytes(in, magic, 4, path);
  if (std::memcmp(magic, "SSAD", 4) != 0) throw InputError(path + ": not an aligned dataset");
  const std::uint32_t version = read_u32(in, path);
  if (version != 1) throw InputError(path + ": unsupported version");

  AlignedDataset data;
  const std::int64_t n = read_i64(in, path);
  const std::uint32_t n_features = read_u32(in, path);
  const std::uint32_t n_outputs = read_u32(in, path);
  if (n < 0 || n_outputs != kNumLabPoints) throw InputError(path + ": malformed header");
  for (std::uint32_t j = 0; j < n_features; ++j) {
    const std::uint32_t len = read_u32(in, path);
    std::string name(len, '\0');
    read_bytes(in, name.data(), len, path);
    data.feature_names.push_back(std::move(name));
  }
  data.timestamps.resize(static_cast<std::size_t>(n));
  for (auto& ts : data.timestamps) ts = read_i64(in, path);
  data.X.resize(n, n_features);
  data.Y.resize(n, n_outputs);
  read_matrix(in, data.X, path);
  read_matrix(in, data.Y, path);
  data.x_scaler.mean.resize(n_features);
  data.x_scaler.std.resize(n_features);
  data.y_scaler.mean.resize(n_outputs);
  data.y_scaler.std.resize(n_outputs);
  read_vector(in, data.x_scaler.mean, path);
  read_vector(in, data.x_scaler.std, path);
  read_vector(in, data.y_scaler.mean, path);
  read_vector(in, data.y_scaler.std, path);
  data.train_idx = read_index_list(in, path);
  data.test_idx = read_index_list(in, path);
  data.dropped_empty_windows = read_i64(in, path);
  data.check_invariants();
  return data;
}

}  // namespace softsense
