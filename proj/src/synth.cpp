#include "softsense/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "softsense/rng.hpp"

namespace softsense {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::int64_t kEpochStart = 1577836800;  // 2020-01-01T00:00:00Z

struct Channel {
  const char* name;
  double base;
  double level_std;  // day-to-day operating level spread
  double noise_std;  // minute measurement noise
  double spike_mult; // per-sensor multiplier on the mean spike rate
};

// Fixed plant model. The first five channels (in importance order T3 > T0 >
// T31 > PT > PB) drive the lab map; F2, F7, T9 are inert process signals.
constexpr Channel kChannels[8] = {
    {"T0", 370.0, 1.10, 2.00, 0.90},  {"T3", 248.0, 0.88, 1.60, 1.10},
    {"T31", 75.0, 0.66, 1.20, 0.60},  {"PT", 11.5, 0.165, 0.30, 1.40},
    {"PB", 16.0, 0.1925, 0.35, 0.35}, {"F2", 120.0, 1.375, 2.50, 1.25},
    {"F7", 45.0, 0.55, 1.00, 1.00},   {"T9", 150.0, 0.825, 1.50, 1.40},
};
// Indices into kChannels of the lab-map drivers, strongest first.
constexpr int kDrivers[5] = {1, 0, 2, 3, 4};
constexpr double kDriverWeight[5] = {0.30, 0.25, 0.20, 0.15, 0.10};
constexpr double kGamma = 0.05;   // T3*T0 interaction
constexpr double kKappa = 0.04;   // T31^2 curvature
constexpr double kSatIn = 0.45;   // inner tanh scale
constexpr double kSatOut = 0.35;  // outer tanh scale
constexpr double kSeason = 0.6;   // weekly level component
constexpr double kLabAmp = 14.0;  // degC span of the lab response
constexpr double kLabNoise = 2.0; // uniform lab noise half-width
constexpr double kLabBase[7] = {190.0, 214.0, 238.0, 262.0, 286.0, 310.0, 334.0};
constexpr double kOutlierFloor = 3.2;  // planted exceedance = sign*(floor+U(0,1))*amp
constexpr double kSpikeLo = 9.0;       // spike magnitude in total-std units
constexpr double kSpikeHi = 14.0;
constexpr double kPeriodShift = 8.0;   // long-period mean shift in total-std units

std::int64_t day_seconds(const SynthSpec& spec) {
  return static_cast<std::int64_t>(spec.day_minutes) * 60;
}

// First k entries of a seeded partial Fisher-Yates over pool, returned sorted.
std::vector<std::int64_t> sample_without_replacement(Rng& rng, std::vector<std::int64_t> pool,
                                                     std::int64_t k) {
  const auto n = static_cast<std::int64_t>(pool.size());
  for (std::int64_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

void SynthSpec::validate() const {
  if (n_days < 1) throw InputError("synth: n_days must be positive");
  if (day_minutes < 1) throw InputError("synth: day_minutes must be positive");
  if (sensors < 5 || sensors > 8) {
    throw InputError("synth: sensors must be in [5, 8] (5 channels drive the lab map)");
  }
  for (double r : {null_rate, dup_rate, lab_outlier_rate, short_outlier_rate}) {
    if (!(r >= 0.0 && r < 1.0)) throw InputError("synth: rates must lie in [0, 1)");
  }
  std::int64_t prev_end = 0;
  for (const auto& [a, b] : long_periods) {
    if (a < 1 || b < a || b > n_days) throw InputError("synth: long period outside day range");
    if (a <= prev_end) throw InputError("synth: long periods overlap or unordered");
    prev_end = b;
  }
  // Feasibility of the artifact layout.
  std::int64_t forced_nulls = 0;
  for (const auto& [a, b] : long_periods) forced_nulls += (b - a);  // all but first day
  if (null_count() < forced_nulls) {
    throw InputError("synth: null_rate too low for the requested long periods");
  }
  const std::int64_t survivors = n_days - null_count();
  const auto first_days = static_cast<std::int64_t>(long_periods.size());
  if (survivors < first_days + lab_outlier_count()) {
    throw InputError("synth: not enough surviving rows for planted outliers");
  }
  if (dup_count() > survivors) throw InputError("synth: dup_rate too high");
}

std::int64_t SynthSpec::dup_count() const {
  return std::llround(dup_rate * static_cast<double>(n_days) / (1.0 - dup_rate));
}

std::int64_t SynthSpec::null_count() const {
  return std::llround(null_rate * static_cast<double>(total_rows()));
}

std::int64_t SynthSpec::lab_outlier_count() const {
  return std::llround(lab_outlier_rate * static_cast<double>(n_days - null_count()));
}

SynthResult generate_synthetic(const SynthSpec& spec) {
  spec.validate();
  const std::int64_t n_days = spec.n_days;
  const int n_sensors = spec.sensors;
  const int day_minutes = spec.day_minutes;
  const std::int64_t day_sec = day_seconds(spec);
  const int win_len = std::min(day_minutes, 60);

  Rng r_art(spec.seed ^ fnv1a64("synth.artifacts"));
  Rng r_lvl(spec.seed ^ fnv1a64("synth.levels"));
  Rng r_noise(spec.seed ^ fnv1a64("synth.noise"));
  Rng r_spike(spec.seed ^ fnv1a64("synth.spikes"));
  Rng r_lab(spec.seed ^ fnv1a64("synth.lab"));

  // ---- artifact layout -----------------------------------------------------
  std::vector<char> in_period(static_cast<std::size_t>(n_days), 0);
  std::vector<char> is_null(static_cast<std::size_t>(n_days), 0);
  std::vector<char> period_first(static_cast<std::size_t>(n_days), 0);
  std::int64_t forced_nulls = 0;
  for (const auto& [a, b] : spec.long_periods) {
    for (std::int64_t d = a - 1; d < b; ++d) in_period[static_cast<std::size_t>(d)] = 1;
    period_first[static_cast<std::size_t>(a - 1)] = 1;
    for (std::int64_t d = a; d < b; ++d) {  // all period days except the first
      is_null[static_cast<std::size_t>(d)] = 1;
      ++forced_nulls;
    }
  }

  std::vector<std::int64_t> eligible;
  eligible.reserve(static_cast<std::size_t>(n_days));
  for (std::int64_t d = 0; d < n_days; ++d) {
    if (!in_period[static_cast<std::size_t>(d)]) eligible.push_back(d);
  }
  for (std::int64_t d :
       sample_without_replacement(r_art, eligible, spec.null_count() - forced_nulls)) {
    is_null[static_cast<std::size_t>(d)] = 1;
  }

  // Which cells each null row blanks: occasionally the whole record, else 1-3.
  std::vector<std::array<char, 7>> null_mask(static_cast<std::size_t>(n_days));
  for (std::int64_t d = 0; d < n_days; ++d) {
    if (!is_null[static_cast<std::size_t>(d)]) continue;
    auto& mask = null_mask[static_cast<std::size_t>(d)];
    mask.fill(0);
    if (r_art.below(10) == 0) {
      mask.fill(1);
    } else {
      const auto k = 1 + static_cast<int>(r_art.below(3));
      std::vector<int> cells = {0, 1, 2, 3, 4, 5, 6};
      r_art.shuffle(cells);
      for (int i = 0; i < k; ++i) mask[static_cast<std::size_t>(cells[static_cast<std::size_t>(i)])] = 1;
    }
  }

  std::vector<std::int64_t> survivors;
  survivors.reserve(static_cast<std::size_t>(n_days));
  std::vector<std::int64_t> outlier_candidates;
  for (std::int64_t d = 0; d < n_days; ++d) {
    if (is_null[static_cast<std::size_t>(d)]) continue;
    survivors.push_back(d);
    if (!period_first[static_cast<std::size_t>(d)]) outlier_candidates.push_back(d);
  }

  struct PlantedOutlier {
    int point;
    double value;
  };
  std::vector<std::int64_t> outlier_days =
      sample_without_replacement(r_art, outlier_candidates, spec.lab_outlier_count());
  std::map<std::int64_t, PlantedOutlier> planted;
  for (std::int64_t d : outlier_days) {
    const int point = static_cast<int>(r_art.below(7));
    const double sign = r_art.below(2) == 0 ? -1.0 : 1.0;
    const double dev = sign * kLabAmp * (kOutlierFloor + r_art.uniform());
    planted[d] = {point, kLabBase[point] + dev};
  }

  std::vector<std::int64_t> dup_days = sample_without_replacement(r_art, survivors, spec.dup_count());
  std::vector<char> is_dup(static_cast<std::size_t>(n_days), 0);
  for (std::int64_t d : dup_days) is_dup[static_cast<std::size_t>(d)] = 1;

  // Long-period mean shifts, one sign per (period, sensor).
  std::vector<std::vector<double>> period_shift(spec.long_periods.size());
  for (std::size_t p = 0; p < spec.long_periods.size(); ++p) {
    period_shift[p].resize(static_cast<std::size_t>(n_sensors));
    for (int s = 0; s < n_sensors; ++s) {
      const Channel& ch = kChannels[s];
      const double total_std = std::hypot(ch.level_std, ch.noise_std);
      const double sign = r_art.below(2) == 0 ? -1.0 : 1.0;
      period_shift[p][static_cast<std::size_t>(s)] = sign * kPeriodShift * total_std;
    }
  }
  std::vector<int> period_of_day(static_cast<std::size_t>(n_days), -1);
  for (std::size_t p = 0; p < spec.long_periods.size(); ++p) {
    for (std::int64_t d = spec.long_periods[p].first - 1; d < spec.long_periods[p].second; ++d) {
      period_of_day[static_cast<std::size_t>(d)] = static_cast<int>(p);
    }
  }

  // ---- signal synthesis ----------------------------------------------------
  std::vector<double> levels(static_cast<std::size_t>(n_days * n_sensors));
  for (std::int64_t d = 0; d < n_days; ++d) {
    for (int s = 0; s < n_sensors; ++s) {
      const double season =
          kSeason * std::sin(2.0 * kPi * static_cast<double>(d) / 7.0 + static_cast<double>(s));
      levels[static_cast<std::size_t>(d * n_sensors + s)] = season + r_lvl.normal();
    }
  }

  SynthResult out;
  SensorTable& sensors = out.sensors;
  LabTable& lab = out.lab;
  GroundTruth& truth = out.truth;

  const std::int64_t n_minutes = n_days * day_minutes;
  sensors.timestamps.reserve(static_cast<std::size_t>(n_minutes));
  sensors.values.resize(n_minutes, n_sensors);
  sensors.valid = BoolMask::Constant(n_minutes, n_sensors, true);
  for (int s = 0; s < n_sensors; ++s) sensors.names.emplace_back(kChannels[s].name);

  const std::int64_t total_lab_rows = spec.total_rows();
  lab.timestamps.reserve(static_cast<std::size_t>(total_lab_rows));
  lab.values.resize(total_lab_rows, kNumLabPoints);
  lab.valid.resize(total_lab_rows, kNumLabPoints);

  truth.sensor_names = sensors.names;
  truth.spike_ts.resize(static_cast<std::size_t>(n_sensors));
  for (int k = 0; k < 5 && k < n_sensors; ++k) {
    truth.importance_order.emplace_back(kChannels[kDrivers[k]].name);
  }
  for (std::size_t p = 0; p < spec.long_periods.size(); ++p) {
    const auto& [a, b] = spec.long_periods[p];
    truth.period_ts.emplace_back(kEpochStart + (a - 1) * day_sec + 60, kEpochStart + b * day_sec);
  }

  std::vector<double> window_sum(static_cast<std::size_t>(n_sensors));
  Eigen::Index lab_row = 0;
  Eigen::Index minute_row = 0;
  for (std::int64_t d = 0; d < n_days; ++d) {
    std::fill(window_sum.begin(), window_sum.end(), 0.0);
    const int period = period_of_day[static_cast<std::size_t>(d)];
    for (int m = 0; m < day_minutes; ++m) {
      const std::int64_t ts = kEpochStart + d * day_sec + 60 * static_cast<std::int64_t>(m + 1);
      sensors.timestamps.push_back(ts);
      for (int s = 0; s < n_sensors; ++s) {
        const Channel& ch = kChannels[s];
        const double clean = ch.base +
                             ch.level_std * levels[static_cast<std::size_t>(d * n_sensors + s)] +
                             ch.noise_std * r_noise.normal();
        double value = clean;
        if (r_spike.uniform() < spec.short_outlier_rate * ch.spike_mult) {
          const double sign = r_spike.below(2) == 0 ? -1.0 : 1.0;
          const double total_std = std::hypot(ch.level_std, ch.noise_std);
          value += sign * total_std * r_spike.uniform(kSpikeLo, kSpikeHi);
          truth.spike_ts[static_cast<std::size_t>(s)].push_back(ts);
          ++truth.total_spikes;
        }
        if (period >= 0) value += period_shift[static_cast<std::size_t>(period)][static_cast<std::size_t>(s)];
        sensors.values(minute_row, s) = value;
        if (m >= day_minutes - win_len) window_sum[static_cast<std::size_t>(s)] += clean;
      }
      ++minute_row;
    }

    // Lab record from the clean backward 1-hour averages.
    const std::int64_t lab_time = kEpochStart + (d + 1) * day_sec;
    double t[5];
    for (int k = 0; k < 5; ++k) {
      const Channel& ch = kChannels[kDrivers[k]];
      const double hm = window_sum[static_cast<std::size_t>(kDrivers[k])] / win_len;
      t[k] = std::tanh((hm - ch.base) / ch.level_std / kSatIn);
    }
    double y[kNumLabPoints];
    for (int j = 0; j < kNumLabPoints; ++j) {
      double L = 0.0;
      for (int k = 0; k < 5; ++k) {
        const double nu = 1.0 + 0.05 * std::sin(static_cast<double>(k + 1 + j));
        L += kDriverWeight[k] * nu * t[k];
      }
      L += kGamma * t[0] * t[1] + kKappa * t[2] * t[2];
      y[j] = kLabBase[j] + kLabAmp * std::tanh(L / kSatOut) + r_lab.uniform(-kLabNoise, kLabNoise);
    }
    if (auto it = planted.find(d); it != planted.end()) {
      y[it->second.point] = it->second.value;
      truth.lab_outliers.emplace_back(lab_time, it->second.point);
    }

    lab.timestamps.push_back(lab_time);
    for (int j = 0; j < kNumLabPoints; ++j) {
      lab.values(lab_row, j) = y[j];
      lab.valid(lab_row, j) = true;
    }
    if (is_null[static_cast<std::size_t>(d)]) {
      truth.null_ts.push_back(lab_time);
      const auto& mask = null_mask[static_cast<std::size_t>(d)];
      for (int j = 0; j < kNumLabPoints; ++j) {
        if (mask[static_cast<std::size_t>(j)]) {
          lab.values(lab_row, j) = std::numeric_limits<double>::quiet_NaN();
          lab.valid(lab_row, j) = false;
        }
      }
    }
    ++lab_row;
    if (is_dup[static_cast<std::size_t>(d)]) {
      truth.dup_ts.push_back(lab_time);
      lab.timestamps.push_back(lab_time);
      lab.values.row(lab_row) = lab.values.row(lab_row - 1);
      lab.valid.row(lab_row) = lab.valid.row(lab_row - 1);
      ++lab_row;
    }
  }

  sensors.check_invariants();
  lab.check_invariants();
  return out;
}

Json ground_truth_to_json(const GroundTruth& truth) {
  Json j;
  j["null_ts"] = truth.null_ts;
  j["dup_ts"] = truth.dup_ts;
  Json outliers = Json::array();
  for (const auto& [ts, point] : truth.lab_outliers) outliers.push_back(Json::array({ts, point}));
  j["lab_outliers"] = outliers;
  j["sensor_names"] = truth.sensor_names;
  j["spike_ts"] = truth.spike_ts;
  Json periods = Json::array();
  for (const auto& [a, b] : truth.period_ts) periods.push_back(Json::array({a, b}));
  j["period_ts"] = periods;
  j["importance_order"] = truth.importance_order;
  j["total_spikes"] = truth.total_spikes;
  return j;
}

GroundTruth ground_truth_from_json(const Json& j) {
  GroundTruth truth;
  try {
    truth.null_ts = j.at("null_ts").get<std::vector<std::int64_t>>();
    truth.dup_ts = j.at("dup_ts").get<std::vector<std::int64_t>>();
    for (const auto& o : j.at("lab_outliers")) {
      truth.lab_outliers.emplace_back(o.at(0).get<std::int64_t>(), o.at(1).get<int>());
    }
    truth.sensor_names = j.at("sensor_names").get<std::vector<std::string>>();
    truth.spike_ts = j.at("spike_ts").get<std::vector<std::vector<std::int64_t>>>();
    for (const auto& p : j.at("period_ts")) {
      truth.period_ts.emplace_back(p.at(0).get<std::int64_t>(), p.at(1).get<std::int64_t>());
    }
    truth.importance_order = j.at("importance_order").get<std::vector<std::string>>();
    truth.total_spikes = j.at("total_spikes").get<std::int64_t>();
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed ground truth: ") + e.what());
  }
  return truth;
}

}  // namespace softsense
