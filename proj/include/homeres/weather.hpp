// SPDX-License-Identifier: Apache-2.0
#pragma once

// NSRDB-style weather CSV ingestion, resampling onto the simulation grid,
// averaged historical temperature profiles, and irradiance forecasts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "homeres/csv.hpp"
#include "homeres/datetime.hpp"

namespace homeres::weather {

struct WeatherRecord {
  DateTime timestamp;
  double ghi = 0.0;           // W/m2
  double ambient_temp = 0.0;  // degC
};

struct HistoricalTempProfile {
  int day_of_year = 0;
  std::vector<double> values;  // one per time-of-day bucket
};

using HistoricalProfileMap = std::map<int, HistoricalTempProfile>;

// Uniformly sampled exogenous inputs. E(k) applies to the interval starting
// at start + k*dt. All arrays share one length.
struct ExogenousTrace {
  double dt_hours = 0.0;
  DateTime start;
  std::vector<double> ghi;
  std::vector<double> ambient_temp;
  std::vector<double> secondary_demand;  // Wh per step

  std::size_t size() const { return ghi.size(); }
  DateTime time_at(std::size_t k) const { return start.plus_hours(dt_hours * k); }
};

struct MissingColumn : std::runtime_error {
  explicit MissingColumn(const std::string& name)
      : std::runtime_error("weather: missing column \"" + name + "\"") {}
};
struct MalformedRow : std::runtime_error {
  MalformedRow(std::size_t row, const std::string& why)
      : std::runtime_error("weather: row " + std::to_string(row) + ": " + why), row_index(row) {}
  std::size_t row_index;
};
struct EmptyFile : std::runtime_error {
  EmptyFile() : std::runtime_error("weather: file has no data rows") {}
};
struct InsufficientCoverage : std::runtime_error {
  explicit InsufficientCoverage(const std::string& why)
      : std::runtime_error("weather: insufficient coverage: " + why) {}
};
struct HorizonOutOfRange : std::runtime_error {
  explicit HorizonOutOfRange(const std::string& why)
      : std::runtime_error("weather: forecast horizon out of range: " + why) {}
};

struct CsvSchema {
  std::string timestamp_column = "ts";
  std::string ghi_column = "ghi";
  std::string temp_column = "temp";
};

// Parses a header-first CSV. Rows are 1-based counting the header as row 1.
// Rows with unparseable fields or negative GHI are rejected with their row
// number; duplicate timestamps are rejected after sorting.
inline std::vector<WeatherRecord> parse_weather_csv(std::istream& in,
                                                    const CsvSchema& schema = {}) {
  std::string line;
  if (!std::getline(in, line)) throw EmptyFile{};
  const auto header = csv::split_line(line);
  auto find_col = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw MissingColumn{name};
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ts_col = find_col(schema.timestamp_column);
  const std::size_t ghi_col = find_col(schema.ghi_column);
  const std::size_t temp_col = find_col(schema.temp_column);

  std::vector<std::pair<WeatherRecord, std::size_t>> rows;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = csv::split_line(line);
    const std::size_t need = std::max({ts_col, ghi_col, temp_col}) + 1;
    if (fields.size() < need) throw MalformedRow{row_no, "expected " + std::to_string(need) + " fields"};
    WeatherRecord rec;
    try {
      rec.timestamp = DateTime::parse(fields[ts_col]);
    } catch (const std::exception& e) {
      throw MalformedRow{row_no, e.what()};
    }
    char* end = nullptr;
    rec.ghi = std::strtod(fields[ghi_col].c_str(), &end);
    if (end == fields[ghi_col].c_str() || *end != '\0' || std::isnan(rec.ghi)) {
      throw MalformedRow{row_no, "bad GHI value \"" + fields[ghi_col] + "\""};
    }
    if (rec.ghi < 0) throw MalformedRow{row_no, "negative GHI"};
    rec.ambient_temp = std::strtod(fields[temp_col].c_str(), &end);
    if (end == fields[temp_col].c_str() || *end != '\0' || std::isnan(rec.ambient_temp)) {
      throw MalformedRow{row_no, "bad temperature value \"" + fields[temp_col] + "\""};
    }
    rows.push_back({rec, row_no});
  }
  if (rows.empty()) throw EmptyFile{};
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.first.timestamp < b.first.timestamp;
  });
  std::vector<WeatherRecord> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].first.timestamp == rows[i - 1].first.timestamp) {
      throw MalformedRow{rows[i].second, "duplicate timestamp"};
    }
    out.push_back(rows[i].first);
  }
  return out;
}

namespace detail {

inline double interp(const std::vector<WeatherRecord>& recs, std::int64_t t,
                     double WeatherRecord::*field) {
  if (t <= recs.front().timestamp.epoch_seconds()) return recs.front().*field;
  if (t >= recs.back().timestamp.epoch_seconds()) return recs.back().*field;
  const auto it = std::lower_bound(recs.begin(), recs.end(), t, [](const WeatherRecord& r,
                                                                   std::int64_t v) {
    return r.timestamp.epoch_seconds() < v;
  });
  const auto hi = it;
  const auto lo = it - 1;
  const double t0 = static_cast<double>(lo->timestamp.epoch_seconds());
  const double t1 = static_cast<double>(hi->timestamp.epoch_seconds());
  const double w = (static_cast<double>(t) - t0) / (t1 - t0);
  return (1.0 - w) * (*lo).*field + w * (*hi).*field;
}

}  // namespace detail

// Piecewise-linear interpolation onto a uniform grid spanning the records.
// Queries outside the record span clamp to the nearest record.
inline ExogenousTrace resample(const std::vector<WeatherRecord>& records, double dt_hours) {
  if (dt_hours <= 0) throw std::invalid_argument("weather: dt_hours must be positive");
  if (records.size() < 2) throw InsufficientCoverage{"need at least two records"};
  const std::int64_t dt_s = static_cast<std::int64_t>(std::llround(dt_hours * 3600.0));
  if (dt_s <= 0 || std::abs(dt_s - dt_hours * 3600.0) > 1e-6) {
    throw std::invalid_argument("weather: dt_hours must be a whole number of seconds");
  }
  const std::int64_t t0 = records.front().timestamp.epoch_seconds();
  const std::int64_t t_end = records.back().timestamp.epoch_seconds();
  const std::size_t steps = static_cast<std::size_t>((t_end - t0) / dt_s) + 1;
  ExogenousTrace trace;
  trace.dt_hours = dt_hours;
  trace.start = records.front().timestamp;
  trace.ghi.resize(steps);
  trace.ambient_temp.resize(steps);
  trace.secondary_demand.assign(steps, 0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    const std::int64_t t = t0 + static_cast<std::int64_t>(k) * dt_s;
    trace.ghi[k] = detail::interp(records, t, &WeatherRecord::ghi);
    trace.ambient_temp[k] = detail::interp(records, t, &WeatherRecord::ambient_temp);
  }
  return trace;
}

// Arithmetic mean of the ambient temperature per (day-of-year, time-of-day)
// bucket over everything the records cover. Records are split into
// contiguous segments (multi-year archives arrive as disjoint blocks) so the
// interpolation never bridges a data gap; days with no samples are absent
// from the map.
inline HistoricalProfileMap build_historical_profile(const std::vector<WeatherRecord>& records,
                                                     double dt_hours) {
  const std::size_t per_day = static_cast<std::size_t>(std::llround(24.0 / dt_hours));
  if (std::abs(per_day * dt_hours - 24.0) > 1e-9) {
    throw std::invalid_argument("weather: dt_hours must divide 24 h");
  }
  if (records.empty()) throw InsufficientCoverage{"no records"};
  constexpr std::int64_t kMaxGapSeconds = 6 * 3600;
  std::vector<std::vector<WeatherRecord>> segments(1);
  for (const auto& r : records) {
    auto& seg = segments.back();
    if (!seg.empty() &&
        r.timestamp.epoch_seconds() - seg.back().timestamp.epoch_seconds() > kMaxGapSeconds) {
      segments.emplace_back();
    }
    segments.back().push_back(r);
  }
  std::map<int, std::pair<std::vector<double>, std::vector<int>>> acc;
  for (const auto& seg : segments) {
    if (seg.size() < 2) continue;
    const ExogenousTrace trace = resample(seg, dt_hours);
    for (std::size_t k = 0; k < trace.size(); ++k) {
      const DateTime t = trace.time_at(k);
      const int doy = t.day_of_year();
      const std::size_t bucket =
          static_cast<std::size_t>(std::llround(t.hour_of_day() / dt_hours));
      if (bucket >= per_day) continue;
      auto& [sums, counts] = acc[doy];
      if (sums.empty()) {
        sums.assign(per_day, 0.0);
        counts.assign(per_day, 0);
      }
      sums[bucket] += trace.ambient_temp[k];
      counts[bucket] += 1;
    }
  }
  HistoricalProfileMap out;
  for (auto& [doy, sc] : acc) {
    auto& [sums, counts] = sc;
    HistoricalTempProfile prof;
    prof.day_of_year = doy;
    prof.values.resize(per_day);
    for (std::size_t b = 0; b < per_day; ++b) {
      if (counts[b] == 0) {
        // Partial first/last day: fill from the nearest populated bucket.
        std::size_t src = b;
        for (std::size_t off = 1; off < per_day; ++off) {
          if (b >= off && counts[b - off] > 0) {
            src = b - off;
            break;
          }
          if (b + off < per_day && counts[b + off] > 0) {
            src = b + off;
            break;
          }
        }
        if (counts[src] == 0) throw InsufficientCoverage{"day " + std::to_string(doy)};
        prof.values[b] = sums[src] / counts[src];
      } else {
        prof.values[b] = sums[b] / counts[b];
      }
    }
    out[doy] = std::move(prof);
  }
  if (out.empty()) throw InsufficientCoverage{"no complete days"};
  return out;
}

// Horizon-aligned slice of the historical profile starting at `start`,
// wrapping across midnight and the end of the year.
inline std::vector<double> slice_profile(const HistoricalProfileMap& profiles, DateTime start,
                                         double dt_hours, std::size_t n) {
  const std::size_t per_day = static_cast<std::size_t>(std::llround(24.0 / dt_hours));
  std::vector<double> out;
  out.reserve(n);
  DateTime t = start;
  for (std::size_t i = 0; i < n; ++i) {
    int doy = t.day_of_year();
    auto it = profiles.find(doy);
    if (it == profiles.end()) {
      // Wrap a missing day (e.g. day 366 queried against a non-leap profile)
      // to the nearest populated entry.
      it = profiles.lower_bound(doy);
      if (it == profiles.end()) --it;
    }
    const std::size_t bucket =
        static_cast<std::size_t>(std::llround(t.hour_of_day() / dt_hours)) % per_day;
    if (it->second.values.size() != per_day) {
      throw InsufficientCoverage{"profile bucket count mismatch"};
    }
    out.push_back(it->second.values[bucket]);
    t = t.plus_hours(dt_hours);
  }
  return out;
}

enum class ForecastMode { Perfect, Persistence };

// Perfect returns the true future slice; Persistence returns the values from
// exactly 24 h earlier.
inline std::vector<double> forecast_irradiance(const ExogenousTrace& trace, std::size_t k,
                                               std::size_t n, ForecastMode mode) {
  const std::size_t steps_per_day = static_cast<std::size_t>(std::llround(24.0 / trace.dt_hours));
  std::size_t base = k;
  if (mode == ForecastMode::Persistence) {
    if (k < steps_per_day) {
      throw HorizonOutOfRange{"persistence needs 24 h of history (k=" + std::to_string(k) + ")"};
    }
    base = k - steps_per_day;
  }
  if (base + n > trace.size()) {
    throw HorizonOutOfRange{"k=" + std::to_string(k) + " N=" + std::to_string(n) + " trace=" +
                            std::to_string(trace.size())};
  }
  return {trace.ghi.begin() + static_cast<std::ptrdiff_t>(base),
          trace.ghi.begin() + static_cast<std::ptrdiff_t>(base + n)};
}

}  // namespace homeres::weather
