#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "stationplan/forecast.hpp"
#include "stationplan/json_io.hpp"
#include "stationplan/records.hpp"
#include "stationplan/tensor.hpp"

namespace stationplan {

/// Distinct incidents per alarm year (an incident is dated by its earliest record).
std::map<int, int> yearly_counts(std::span<const FireRecord> records);

struct FiveNumber {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
  std::size_t count = 0;
};

/// Inclusive linear-interpolation quantile: position (n - 1) * p.
double quantile_inclusive(std::span<const double> sorted, double p);
/// Throws Error(invalid_argument) for an empty sample.
FiveNumber five_number(std::vector<double> values);

/// Per alarm year, over every record's response time.
std::map<int, FiveNumber> response_distribution(std::span<const FireRecord> records);

inline constexpr int kCompassSectors = 6;

/// Six 60-degree sectors centred on 0, 60, ..., 300 degrees; sector 0 is [-30, 30).
int compass_sector(double bearing_deg) noexcept;

struct TimeSector {
  int start_hour = 0;
  int end_hour = 0;  // exclusive
  int below_k = 0;
  int at_or_above_k = 0;
};

struct StationProfile {
  std::string station_id;
  int total = 0;
  int primary = 0;
  int backup = 0;
  std::array<int, kCompassSectors> compass{};
  std::vector<TimeSector> time_sectors;
  double k_minutes = 9.0;
};

/// Actions of one station.  `sector_hours` must divide 24.  Throws
/// Error(not_found) for an unknown station.
StationProfile station_profile(std::span<const FireRecord> records, std::span<const Station> stations,
                               const std::string& station_id, double k_minutes = 9.0, int sector_hours = 4);

struct StationSummary {
  std::string id;
  GeoPoint location;
  int total = 0;
  int primary = 0;
  int backup = 0;
};

/// One row per station in table order; records for unknown stations are ignored.
std::vector<StationSummary> station_summaries(std::span<const FireRecord> records,
                                              std::span<const Station> stations);

struct SdPoint {
  YearMonth month;
  double actual = 0.0;
  double predicted = 0.0;
  double baseline = 0.0;
  std::vector<double> phi;  // signed, per feature
};

/// City-wide supply/demand series.  Throws Error(shape_mismatch) when the
/// grids differ or a month is missing from `actuals`.
std::vector<SdPoint> sd_series(const AttributionFrame& frame, const SpatioTemporalTensor& actuals);

Json yearly_counts_json(const std::map<int, int>& counts);
Json to_json(const std::map<int, FiveNumber>& dist);
Json to_json(const StationProfile& p);
Json to_json(std::span<const StationSummary> rows);
Json sd_series_json(std::span<const SdPoint> series, std::span<const std::string> features);

}  // namespace stationplan
