#include "softsense/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string_view>

namespace softsense {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Reads one logical CSV record, honoring quoted fields that may contain
// embedded newlines. Returns false on end of input.
bool read_record(std::istream& in, std::string& record) {
  record.clear();
  int c = in.get();
  if (c == EOF) return false;
  bool in_quotes = false;
  while (c != EOF) {
    char ch = static_cast<char>(c);
    if (ch == '"') {
      in_quotes = !in_quotes;
      record.push_back(ch);
    } else if (ch == '\n' && !in_quotes) {
      break;
    } else {
      record.push_back(ch);
    }
    c = in.get();
  }
  if (!record.empty() && record.back() == '\r') record.pop_back();
  return true;
}

std::vector<std::string> split_record(const std::string& record, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  std::size_t i = 0;
  const std::size_t n = record.size();
  while (i <= n) {
    if (i == n) {
      fields.push_back(field);
      break;
    }
    char ch = record[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < n && record[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      if (!field.empty()) {
        throw InputError("csv line " + std::to_string(line_no) + ": quote inside unquoted field");
      }
      in_quotes = true;
    } else if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else {
      field.push_back(ch);
    }
    ++i;
  }
  if (in_quotes) {
    throw InputError("csv line " + std::to_string(line_no) + ": unterminated quoted field");
  }
  return fields;
}

bool is_missing_token(std::string_view s) {
  if (s.empty()) return true;
  auto eq_ci = [&](std::string_view t) {
    if (s.size() != t.size()) return false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(s[i])) != t[i]) return false;
    }
    return true;
  };
  return eq_ci("na") || eq_ci("nan") || eq_ci("null");
}

double parse_double_field(std::string_view s, std::size_t line_no) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw InputError("csv line " + std::to_string(line_no) + ": bad numeric value '" +
                     std::string(s) + "'");
  }
  return v;
}

std::int64_t parse_timestamp_field(std::string_view s, std::size_t line_no) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw InputError("csv line " + std::to_string(line_no) + ": bad timestamp '" +
                     std::string(s) + "'");
  }
  return v;
}

void strip_bom(std::string& s) {
  if (s.size() >= 3 && static_cast<unsigned char>(s[0]) == 0xEF &&
      static_cast<unsigned char>(s[1]) == 0xBB && static_cast<unsigned char>(s[2]) == 0xBF) {
    s.erase(0, 3);
  }
}

std::string quote_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

SensorTable parse_sensor_csv(const std::string& path, const SensorColumnMap& spec) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);

  std::string record;
  if (!read_record(in, record)) throw InputError(path + ": empty file");
  strip_bom(record);
  const std::vector<std::string> header = split_record(record, 1);
  if (header.size() < 2) throw InputError(path + ": need a timestamp column and at least one sensor column");

  auto column_index = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InputError(path + ": no column named '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };

  std::size_t ts_col = 0;
  if (!spec.timestamp_column.empty()) ts_col = column_index(spec.timestamp_column);

  std::vector<std::size_t> value_cols;
  SensorTable table;
  if (spec.sensor_columns.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (j == ts_col) continue;
      value_cols.push_back(j);
      table.names.push_back(header[j]);
    }
  } else {
    for (const std::string& name : spec.sensor_columns) {
      std::size_t j = column_index(name);
      if (j == ts_col) throw InputError(path + ": column '" + name + "' is the timestamp column");
      value_cols.push_back(j);
      table.names.push_back(name);
    }
  }

  std::vector<std::int64_t> timestamps;
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<bool>> row_valid;
  std::size_t line_no = 1;
  while (read_record(in, record)) {
    ++line_no;
    if (record.empty()) continue;
    const std::vector<std::string> fields = split_record(record, line_no);
    if (fields.size() != header.size()) {
      throw InputError("csv line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    timestamps.push_back(parse_timestamp_field(fields[ts_col], line_no));
    std::vector<double> vals(value_cols.size(), kNaN);
    std::vector<bool> ok(value_cols.size(), false);
    for (std::size_t k = 0; k < value_cols.size(); ++k) {
      const std::string& f = fields[value_cols[k]];
      if (!is_missing_token(f)) {
        vals[k] = parse_double_field(f, line_no);
        ok[k] = true;
      }
    }
    rows.push_back(std::move(vals));
    row_valid.push_back(std::move(ok));
  }

  const std::size_t n = timestamps.size();
  const std::size_t m = value_cols.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return timestamps[a] < timestamps[b]; });

  table.timestamps.resize(n);
  table.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  table.valid.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = order[i];
    table.timestamps[i] = timestamps[src];
    for (std::size_t k = 0; k < m; ++k) {
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[src][k];
      table.valid(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row_valid[src][k];
    }
  }
  table.check_invariants();
  return table;
}

LabTable parse_lab_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);

  std::string record;
  if (!read_record(in, record)) throw InputError(path + ": empty file");
  strip_bom(record);
  const std::vector<std::string> header = split_record(record, 1);
  if (header.size() != 1 + kNumLabPoints) {
    throw InputError(path + ": expected " + std::to_string(1 + kNumLabPoints) +
                     " columns (timestamp + " + std::to_string(kNumLabPoints) +
                     " distillation points), got " + std::to_string(header.size()));
  }

  std::vector<std::int64_t> timestamps;
  std::vector<std::array<double, kNumLabPoints>> rows;
  std::vector<std::array<bool, kNumLabPoints>> row_valid;
  std::size_t line_no = 1;
  while (read_record(in, record)) {
    ++line_no;
    if (record.empty()) continue;
    const std::vector<std::string> fields = split_record(record, line_no);
    if (fields.size() != header.size()) {
      throw InputError("csv line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    timestamps.push_back(parse_timestamp_field(fields[0], line_no));
    std::array<double, kNumLabPoints> vals;
    std::array<bool, kNumLabPoints> ok;
    for (int k = 0; k < kNumLabPoints; ++k) {
      const std::string& f = fields[static_cast<std::size_t>(k) + 1];
      if (is_missing_token(f)) {
        vals[static_cast<std::size_t>(k)] = kNaN;
        ok[static_cast<std::size_t>(k)] = false;
      } else {
        double v = parse_double_field(f, line_no);
        // A reported 0.0 degC boiling point is a placeholder for a failed
        // analysis, not a physical value; treat it as missing.
        if (v == 0.0) {
          vals[static_cast<std::size_t>(k)] = kNaN;
          ok[static_cast<std::size_t>(k)] = false;
        } else {
          vals[static_cast<std::size_t>(k)] = v;
          ok[static_cast<std::size_t>(k)] = true;
        }
      }
    }
    rows.push_back(vals);
    row_valid.push_back(ok);
  }

  const std::size_t n = timestamps.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return timestamps[a] < timestamps[b]; });

  LabTable table;
  table.timestamps.resize(n);
  table.values.resize(static_cast<Eigen::Index>(n), kNumLabPoints);
  table.valid.resize(static_cast<Eigen::Index>(n), kNumLabPoints);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = order[i];
    table.timestamps[i] = timestamps[src];
    for (int k = 0; k < kNumLabPoints; ++k) {
      table.values(static_cast<Eigen::Index>(i), k) = rows[src][static_cast<std::size_t>(k)];
      table.valid(static_cast<Eigen::Index>(i), k) = row_valid[src][static_cast<std::size_t>(k)];
    }
  }
  table.check_invariants();
  return table;
}

void write_sensor_csv(const SensorTable& table, const std::string& path) {
  table.check_invariants();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open file for writing: " + path);
  out << "timestamp";
  for (const std::string& name : table.names) out << ',' << quote_field(name);
  out << '\n';
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    out << table.timestamps[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < table.cols(); ++j) {
      out << ',';
      if (table.valid(i, j)) out << format_double(table.values(i, j));
    }
    out << '\n';
  }
  if (!out) throw InputError("write failed: " + path);
}

void write_lab_csv(const LabTable& table, const std::string& path) {
  table.check_invariants();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open file for writing: " + path);
  out << "timestamp";
  for (int pt : kLabPoints) out << ",p" << pt;
  out << '\n';
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    out << table.timestamps[static_cast<std::size_t>(i)];
    for (int k = 0; k < kNumLabPoints; ++k) {
      out << ',';
      if (table.valid(i, k)) out << format_double(table.values(i, k));
    }
    out << '\n';
  }
  if (!out) throw InputError("write failed: " + path);
}

}  // namespace softsense
