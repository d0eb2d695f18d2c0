#include "softsense/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "softsense/csv.hpp"
#include "softsense/rng.hpp"

namespace softsense {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw InputError("config: invalid value for " + key + ": '" + value + "'");
}

template <typename T>
T parse_int(const std::string& key, const std::string& value) {
  T v{};
  const auto* begin = value.data();
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end) bad_value(key, value);
  return v;
}

double parse_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  const auto* begin = value.data();
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end) bad_value(key, value);
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, sep)) parts.push_back(trim(part));
  return parts;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  for (const std::string& part : split(value, ',')) out.push_back(parse_int<int>(key, part));
  if (out.empty()) bad_value(key, value);
  return out;
}

std::vector<std::pair<std::int64_t, std::int64_t>> parse_periods(const std::string& key,
                                                                 const std::string& value) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  if (value == "none") return out;
  for (const std::string& part : split(value, ',')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) bad_value(key, value);
    out.emplace_back(parse_int<std::int64_t>(key, trim(part.substr(0, colon))),
                     parse_int<std::int64_t>(key, trim(part.substr(colon + 1))));
  }
  return out;
}

using Setter = std::function<void(PipelineConfig&, const std::string&, const std::string&)>;

// One entry per documented key; defaults are the PipelineConfig initializers.
const std::map<std::string, Setter>& registry() {
  static const std::map<std::string, Setter> kRegistry = {
      {"seed", [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.seed = parse_int<std::uint64_t>(k, v);
       }},
      {"out_dir", [](PipelineConfig& c, const std::string& k, const std::string& v) {
         if (v.empty()) bad_value(k, v);
         c.out_dir = v;
       }},
      {"synth.n_days", [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.synth.n_days = parse_int<std::int64_t>(k, v);
       }},
      {"synth.day_minutes", [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.synth.day_minutes = parse_int<int>(k, v);
       }},
      {"synth.sensors", [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.synth.sensors = parse_int<int>(k, v);
       }},
      {"synth.null_rate", [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.synth.null_rate = parse_double(k, v);
       }},
      {"synth.dup_rate", [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.synth.dup_rate = parse_double(k, v);
       }},
      {"synth.lab_outlier_rate", [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.synth.lab_outlier_rate = parse_double(k, v);
       }},
      {"synth.short_outlier_rate",
       [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.synth.short_outlier_rate = parse_double(k, v);
       }},
      {"synth.long_periods", [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.synth.long_periods = parse_periods(k, v);
       }},
      {"lab.iqr_multiplier", [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.lab_iqr_multiplier = parse_double(k, v);
       }},
      {"sensors.penalty_factor", [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.sensors.penalty_factor = parse_double(k, v);
       }},
      {"sensors.min_seg", [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.sensors.min_seg = parse_int<std::int64_t>(k, v);
       }},
      {"sensors.var_target", [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.sensors.var_target = parse_double(k, v);
       }},
      {"sensors.alpha", [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.sensors.alpha = parse_double(k, v);
       }},
      {"sensors.min_duration", [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.sensors.min_duration = parse_int<std::int64_t>(k, v);
       }},
      {"align.window_seconds", [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.align.window_seconds = parse_int<std::int64_t>(k, v);
       }},
      {"align.train_frac", [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.align.train_frac = parse_double(k, v);
       }},
      {"align.chronological_split",
       [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.align.chronological_split = parse_bool(k, v);
       }},
      {"align.scaler_fit_all", [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.align.scaler_fit_all = parse_bool(k, v);
       }},
      {"baseline.seasonal_period",
       [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.baseline_m = parse_int<int>(k, v);
       }},
      {"train.hidden", [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.train.hidden = parse_int_list(k, v);
       }},
      {"train.max_epochs", [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.train.max_epochs = parse_int<int>(k, v);
       }},
      {"train.learning_rate", [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.train.learning_rate = parse_double(k, v);
       }},
      {"train.huber_delta", [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.train.huber_delta = parse_double(k, v);
       }},
      {"explain.background_rows",
       [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.explain_background = parse_int<int>(k, v);
       }},
      {"explain.permutations", [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.explain_permutations = parse_int<int>(k, v);
       }},
      {"evaluate.histogram_bins",
       [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.histogram_bins = parse_int<int>(k, v);
       }},
  };
  return kRegistry;
}

std::string periods_to_string(const std::vector<std::pair<std::int64_t, std::int64_t>>& periods) {
  if (periods.empty()) return "none";
  std::string out;
  for (const auto& [a, b] : periods) {
    if (!out.empty()) out += ',';
    out += std::to_string(a) + ':' + std::to_string(b);
  }
  return out;
}

std::string hidden_to_string(const std::vector<int>& hidden) {
  std::string out;
  for (int h : hidden) {
    if (!out.empty()) out += ',';
    out += std::to_string(h);
  }
  return out;
}

}  // namespace

void PipelineConfig::validate() const {
  synth.validate();
  if (!(lab_iqr_multiplier > 0.0)) throw InputError("config: lab.iqr_multiplier must be positive");
  if (!(sensors.penalty_factor > 0.0)) {
    throw InputError("config: sensors.penalty_factor must be positive");
  }
  if (sensors.min_seg < 2) throw InputError("config: sensors.min_seg must be at least 2");
  if (!(sensors.var_target > 0.0) || sensors.var_target > 1.0) {
    throw InputError("config: sensors.var_target must be in (0, 1]");
  }
  if (!(sensors.alpha > 0.0) || !(sensors.alpha < 1.0)) {
    throw InputError("config: sensors.alpha must be in (0, 1)");
  }
  if (sensors.min_duration < 1) throw InputError("config: sensors.min_duration must be positive");
  if (align.window_seconds < 1) throw InputError("config: align.window_seconds must be positive");
  if (!(align.train_frac > 0.0) || !(align.train_frac < 1.0)) {
    throw InputError("config: align.train_frac must be in (0, 1)");
  }
  if (baseline_m < 1) throw InputError("config: baseline.seasonal_period must be at least 1");
  if (train.hidden.empty()) throw InputError("config: train.hidden must list at least one layer");
  for (int h : train.hidden) {
    if (h < 1) throw InputError("config: train.hidden sizes must be positive");
  }
  if (train.max_epochs < 1) throw InputError("config: train.max_epochs must be positive");
  if (!(train.learning_rate > 0.0)) throw InputError("config: train.learning_rate must be positive");
  if (!(train.huber_delta > 0.0)) throw InputError("config: train.huber_delta must be positive");
  if (explain_background < 1) {
    throw InputError("config: explain.background_rows must be positive");
  }
  if (explain_permutations < 0) {
    throw InputError("config: explain.permutations must be non-negative");
  }
  if (histogram_bins < 1) throw InputError("config: evaluate.histogram_bins must be positive");
}

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = registry().find(key);
    if (it == registry().end()) throw InputError("config: unknown key: " + key);
    if (!seen.insert(key).second) throw InputError("config: duplicate key: " + key);
    it->second(cfg, key, value);
  }
  set_master_seed(cfg, cfg.seed);
  cfg.validate();
  return cfg;
}

void set_master_seed(PipelineConfig& cfg, std::uint64_t seed) {
  cfg.seed = seed;
  cfg.synth.seed = seed;
  cfg.align.seed = seed;
  cfg.train.seed = seed;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string config_to_string(const PipelineConfig& cfg) {
  std::map<std::string, std::string> values = {
      {"seed", std::to_string(cfg.seed)},
      {"out_dir", cfg.out_dir},
      {"synth.n_days", std::to_string(cfg.synth.n_days)},
      {"synth.day_minutes", std::to_string(cfg.synth.day_minutes)},
      {"synth.sensors", std::to_string(cfg.synth.sensors)},
      {"synth.null_rate", format_double(cfg.synth.null_rate)},
      {"synth.dup_rate", format_double(cfg.synth.dup_rate)},
      {"synth.lab_outlier_rate", format_double(cfg.synth.lab_outlier_rate)},
      {"synth.short_outlier_rate", format_double(cfg.synth.short_outlier_rate)},
      {"synth.long_periods", periods_to_string(cfg.synth.long_periods)},
      {"lab.iqr_multiplier", format_double(cfg.lab_iqr_multiplier)},
      {"sensors.penalty_factor", format_double(cfg.sensors.penalty_factor)},
      {"sensors.min_seg", std::to_string(cfg.sensors.min_seg)},
      {"sensors.var_target", format_double(cfg.sensors.var_target)},
      {"sensors.alpha", format_double(cfg.sensors.alpha)},
      {"sensors.min_duration", std::to_string(cfg.sensors.min_duration)},
      {"align.window_seconds", std::to_string(cfg.align.window_seconds)},
      {"align.train_frac", format_double(cfg.align.train_frac)},
      {"align.chronological_split", cfg.align.chronological_split ? "true" : "false"},
      {"align.scaler_fit_all", cfg.align.scaler_fit_all ? "true" : "false"},
      {"baseline.seasonal_period", std::to_string(cfg.baseline_m)},
      {"train.hidden", hidden_to_string(cfg.train.hidden)},
      {"train.max_epochs", std::to_string(cfg.train.max_epochs)},
      {"train.learning_rate", format_double(cfg.train.learning_rate)},
      {"train.huber_delta", format_double(cfg.train.huber_delta)},
      {"explain.background_rows", std::to_string(cfg.explain_background)},
      {"explain.permutations", std::to_string(cfg.explain_permutations)},
      {"evaluate.histogram_bins", std::to_string(cfg.histogram_bins)},
  };
  std::string out;
  for (const auto& [key, value] : values) out += key + " = " + value + "\n";
  return out;
}

std::string config_hash(const PipelineConfig& cfg) {
  // The output directory decides where artifacts land, not what they contain,
  // so it is pinned before hashing: equal settings hash equal anywhere.
  PipelineConfig canon = cfg;
  canon.out_dir = "out";
  const std::uint64_t h = fnv1a64(config_to_string(canon));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace softsense
