#pragma once

// Dataset loading and the JSON payloads shared by the CLI and the HTTP API.

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stationplan/analytics.hpp"
#include "stationplan/criteria.hpp"
#include "stationplan/forecast.hpp"
#include "stationplan/ingest.hpp"
#include "stationplan/json_io.hpp"
#include "stationplan/mobility.hpp"
#include "stationplan/optimizer.hpp"
#include "stationplan/simulate.hpp"

namespace stationplan {

struct AppConfig {
  std::filesystem::path fires_csv;
  std::filesystem::path stations_csv;
  std::optional<std::filesystem::path> features_csv;

  std::optional<GridSpec> grid;  // fitted around fires and stations when absent
  double cell_size_km = 3.0;
  int grid_margin_cells = 1;
  std::optional<MonthWindow> window;  // span of the fire records when absent

  TravelParams travel;
  double k_minutes = 9.0;
  bool include_existing = true;

  bool forecast_enabled = true;
  ForecastConfig forecast;

  Bucketing bucketing = Bucketing::Quarter;
  bool transfer_backup = false;

  GAConfig ga;

  std::string host = "127.0.0.1";
  int port = 8080;
  int workers = 2;
};

/// Relative dataset paths resolve against `base_dir`.  Throws
/// Error(validation_error) for malformed or missing fields.
AppConfig config_from_json(const Json& j, const std::filesystem::path& base_dir);
AppConfig load_config(const std::filesystem::path& file);
Json to_json(const AppConfig& c);

/// Everything derived from the configured datasets.  Immutable once loaded,
/// so concurrent readers need no locking.
struct Workspace {
  AppConfig config;
  std::vector<FireRecord> fires;
  std::vector<FireRecord> window_fires;  // records whose alarm month is inside `window`
  std::vector<Station> stations;
  std::vector<FeatureTable> features;
  std::vector<RowReject> fire_rejects, station_rejects, feature_rejects;
  std::vector<std::string> unknown_stations;

  GridSpec grid;
  MonthWindow window;
  std::optional<SpatioTemporalTensor> tensor;
  std::size_t incidents = 0;
  std::size_t skipped_out_of_extent = 0;
  std::size_t skipped_out_of_window = 0;

  std::unique_ptr<Forecaster> model;
  std::optional<AttributionFrame> attribution;
  std::string forecast_status = "disabled";  // "ok", "disabled" or the failure message

  CellDemand demand;                          // over window_fires
  std::optional<ReachabilityField> field;     // absent without stations

  static std::shared_ptr<const Workspace> load(const AppConfig& cfg);
};

Json ingest_summary(const Workspace& ws);
Json reachability_payload(const Workspace& ws, double k);
Json underserved_payload(const Workspace& ws, double k);
Json grid_payload(const Workspace& ws, const std::optional<YearMonth>& month);
/// Throws Error(not_found) when the forecaster is unavailable.
Json sd_series_payload(const Workspace& ws);
Json forecast_payload(const Workspace& ws);
Json station_profile_payload(const Workspace& ws, const std::string& id, double k, int sector_hours);

struct OptimizeRequest {
  Json area_json;
  std::vector<Criterion> criteria;
  int k_new = 1;
  GAConfig ga;
};

/// {area, criteria, k_new, ga_config?, seed?}.  Validates everything that can
/// be checked without running, throwing Error(validation_error).
OptimizeRequest parse_optimize_request(const Json& body, const Workspace& ws);
Json run_optimize(const Workspace& ws, const OptimizeRequest& req, const ProgressFn& progress = {});

/// {area, criteria, genome: [point, ...]} -> objectives for one layout.
Json evaluate_payload(const Workspace& ws, const Json& body);

struct SimulateRequest {
  std::vector<std::pair<std::string, Genome>> solutions;
  Bucketing bucketing = Bucketing::Quarter;
  bool transfer_backup = false;
};

/// Accepts {solutions: [{id?, genome}], bucketing?, transfer_backup?}, a
/// single {genome}, or an optimize result (its solutions are replayed).
SimulateRequest parse_simulate_request(const Json& body, const Workspace& ws);
Json run_simulate(const Workspace& ws, const SimulateRequest& req);

/// {"error": {"code", "message"}}
Json error_json(const std::string& code, const std::string& message);

}  // namespace stationplan
