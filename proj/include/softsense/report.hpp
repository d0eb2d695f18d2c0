#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "softsense/tables.hpp"

namespace softsense {

// nlohmann::json with the default (std::map) object type keeps keys sorted,
// which makes every serialized report byte-stable for fixed content.
using Json = nlohmann::json;

Json clean_report_to_json(const CleanReport& report);
CleanReport clean_report_from_json(const Json& j);

// Two-space indent, sorted keys, trailing newline.
std::string dump_json(const Json& j);
void write_json(const Json& j, const std::string& path);
Json read_json(const std::string& path);

}  // namespace softsense
