#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "stationplan/records.hpp"
#include "stationplan/tensor.hpp"

namespace stationplan {

/// A quarantined input row.  `line` is the 1-based physical line number
/// (the header is line 1).
struct RowReject {
  std::size_t line = 0;
  std::string reason;
};

template <class T>
struct ParseResult {
  std::vector<T> items;
  std::vector<RowReject> rejects;
};

/// Required columns: id, lat, lng, alarm_time, response_time_min, station_id,
/// role.  A missing column throws Error(parse_error); malformed rows are
/// rejected and reported.
ParseResult<FireRecord> parse_fire_records(std::istream& in);

/// Required columns: id, lat, lng, commissioned.  Optional: staffing.
/// Duplicate ids throw Error(parse_error) naming the id.
ParseResult<Station> parse_stations(std::istream& in);

enum class Granularity { PerCellPerMonth, PerMonthGlobal, PerCellStatic };

std::string_view to_string(Granularity g) noexcept;

/// Values of one named feature.  Keys use -1 for an unused cell component and
/// YearMonth{} sentinel kNoMonth for an unused month.
struct FeatureTable {
  static constexpr int kNoMonth = -1'000'000;
  using Key = std::tuple<int, int, int>;  // (row, col, month ordinal)

  std::string feature;
  Granularity granularity = Granularity::PerCellPerMonth;
  std::map<Key, double> values;

  /// Resolved value for a cell and month, honouring broadcast rules.
  std::optional<double> lookup(CellIndex cell, YearMonth month) const;
};

/// Columns: feature, granularity, cell_i, cell_j, month, value (unused keys
/// blank).  Tables come back in first-appearance order.  A feature listed with
/// two different granularities throws; duplicate keys and non-finite values
/// are rejected rows.
ParseResult<FeatureTable> parse_feature_tables(std::istream& in);

/// Inclusive range of calendar months.
struct MonthWindow {
  YearMonth start;
  YearMonth end;
};

struct RasterResult {
  SpatioTemporalTensor tensor;
  std::size_t incidents = 0;              // distinct incident ids counted
  std::size_t skipped_out_of_extent = 0;  // in window, outside the grid
  std::size_t skipped_out_of_window = 0;
};

/// Builds the [t][channel][row][col] tensor.  Channel 0 counts distinct
/// incidents per cell and alarm month; remaining channels follow `features`
/// in order.  With interval_months > 1 each timestamp covers that many months
/// and feature values are averaged over the months present.
RasterResult rasterize(std::span<const FireRecord> records, std::span<const FeatureTable> features,
                       const GridSpec& grid, MonthWindow window, int interval_months = 1);

/// Ids referenced by records that are not among `stations`, sorted.
std::vector<std::string> unknown_station_refs(std::span<const FireRecord> records,
                                              std::span<const Station> stations);

void write_fire_records(std::ostream& out, std::span<const FireRecord> records);
void write_stations(std::ostream& out, std::span<const Station> stations);
void write_feature_tables(std::ostream& out, std::span<const FeatureTable> tables);

/// Tensor file: one line of JSON header, '\n', then shape-many little-endian
/// binary64 values in [t][c][row][col] order.  See docs/tensor-format.md.
void write_tensor(std::ostream& out, const SpatioTemporalTensor& tensor);
SpatioTemporalTensor read_tensor(std::istream& in);

}  // namespace stationplan
