#include "softsense/report.hpp"

#include <fstream>

namespace softsense {

Json clean_report_to_json(const CleanReport& report) {
  report.check_invariants();
  Json counts;
  counts["null"] = report.removed_null;
  counts["duplicate"] = report.removed_duplicate;
  counts["outlier"] = report.removed_outlier;
  Json repaired = Json::object();
  for (const auto& [name, n] : report.repaired_short_term) repaired[name] = n;
  counts["repaired_short_term"] = repaired;

  Json periods = Json::array();
  for (const auto& [start, end] : report.long_term_periods) {
    periods.push_back(Json::array({start, end}));
  }

  Json metrics = Json::object();
  for (const auto& [key, value] : report.metrics) metrics[key] = value;

  Json j;
  j["stage"] = report.stage;
  j["counts"] = counts;
  j["periods"] = periods;
  j["metrics"] = metrics;
  return j;
}

CleanReport clean_report_from_json(const Json& j) {
  CleanReport report;
  try {
    report.stage = j.at("stage").get<std::string>();
    const Json& counts = j.at("counts");
    report.removed_null = counts.at("null").get<std::int64_t>();
    report.removed_duplicate = counts.at("duplicate").get<std::int64_t>();
    report.removed_outlier = counts.at("outlier").get<std::int64_t>();
    for (const auto& [name, n] : counts.at("repaired_short_term").items()) {
      report.repaired_short_term[name] = n.get<std::int64_t>();
    }
    for (const auto& p : j.at("periods")) {
      report.long_term_periods.emplace_back(p.at(0).get<std::int64_t>(),
                                            p.at(1).get<std::int64_t>());
    }
    for (const auto& [key, value] : j.at("metrics").items()) {
      report.metrics[key] = value.get<double>();
    }
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed clean report: ") + e.what());
  }
  report.check_invariants();
  return report;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

void write_json(const Json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open file for writing: " + path);
  out << dump_json(j);
  if (!out) throw InputError("write failed: " + path);
}

Json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw InputError(path + ": invalid JSON: " + e.what());
  }
}

}  // namespace softsense
