#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stationplan/json_io.hpp"
#include "stationplan/mobility.hpp"
#include "stationplan/records.hpp"

namespace stationplan {

enum class Bucketing { Month, Quarter, Year };

std::string_view to_string(Bucketing b) noexcept;
Bucketing parse_bucketing(std::string_view s);  // "month" | "quarter" | "year"

/// Dense period ordinal of an instant under a bucketing.
int period_of(Timestamp t, Bucketing b);
/// "2014-03", "2014-Q1" or "2014".
std::string period_label(int period, Bucketing b);

/// Row used for records whose station id is not in the station table.
inline constexpr std::string_view kUnknownStationRow = "unknown";

struct SimConfig {
  TravelParams travel;
  Bucketing bucketing = Bucketing::Quarter;
  bool transfer_backup = false;  // backup-role records stay put unless set
};

struct StationRow {
  int before = 0;
  int after = 0;
};

struct TransferEdge {
  std::string from;  // existing station id or the unknown row
  std::string to;    // new station id
  int weight = 0;
};

struct PeriodFlows {
  int period = 0;
  std::string label;
  std::map<std::string, StationRow> existing;  // every existing station (+ unknown row if used)
  std::map<std::string, int> assigned;         // every new station
  std::vector<TransferEdge> edges;             // sorted by (from, to); weights > 0
  int total_transferred = 0;
};

struct TransferSimReport {
  Bucketing bucketing = Bucketing::Quarter;
  std::vector<Station> existing;
  std::vector<Station> added;  // N1, N2, ... in genome order
  std::vector<PeriodFlows> periods;  // contiguous from first to last record
  std::vector<std::string> unknown_station_ids;  // sorted; non-empty means flagged
  int total_transferred = 0;
};

/// Replays each record: when the fastest new station's simulated time beats
/// the recorded response, the action moves to that station (ties to the
/// lower index).  Throws Error(invalid_argument) for an empty solution.
TransferSimReport simulate_transfers(std::span<const FireRecord> fires, std::span<const Station> existing,
                                     std::span<const GeoPoint> solution, const SimConfig& cfg);

struct Comparison {
  Bucketing bucketing = Bucketing::Quarter;
  std::vector<std::string> solution_ids;  // sorted
  std::vector<std::string> periods;       // labels, union of all reports, ordered
  std::vector<std::vector<int>> totals;   // [period][solution]
  std::vector<std::vector<int>> cumulative;  // [solution][period]
};

/// Aligns reports on the union of their periods; a period missing from a
/// report counts 0.  Throws Error(validation_error) on mixed bucketing.
Comparison compare(std::span<const std::pair<std::string, TransferSimReport>> reports);

Json to_json(const TransferSimReport& r);
Json to_json(const Comparison& c);

}  // namespace stationplan
