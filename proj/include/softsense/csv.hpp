#pragma once

#include <string>
#include <vector>

#include "softsense/tables.hpp"

namespace softsense {

// Column selection for sensor files. Empty timestamp_column means the first
// column; empty sensor_columns means every non-timestamp column.
struct SensorColumnMap {
  std::string timestamp_column;
  std::vector<std::string> sensor_columns;
};

SensorTable parse_sensor_csv(const std::string& path, const SensorColumnMap& spec = {});
LabTable parse_lab_csv(const std::string& path);

void write_sensor_csv(const SensorTable& table, const std::string& path);
void write_lab_csv(const LabTable& table, const std::string& path);

// Round-trip safe double formatting (shortest representation).
std::string format_double(double v);

}  // namespace softsense
