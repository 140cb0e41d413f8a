#include "stationplan/app.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "stationplan/error.hpp"

namespace stationplan {

namespace fs = std::filesystem;

Json error_json(const std::string& code, const std::string& message) {
  return {{"error", {{"code", code}, {"message", message}}}};
}

namespace {

std::ifstream open_input(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(errc::kIo, "cannot open '" + p.string() + "'");
  return in;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

// Runs a JSON accessor and turns library exceptions into validation errors.
template <class F>
auto checked(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(errc::kValidation, what + ": " + e.what());
  } catch (const Json::exception& e) {
    throw Error(errc::kValidation, what + ": " + e.what());
  }
}

std::vector<Criterion> parse_criteria(const Json& j) {
  if (!j.is_array() || j.empty()) throw Error(errc::kValidation, "criteria must be a non-empty array");
  std::vector<Criterion> out;
  for (const auto& c : j) {
    if (!c.is_string()) throw Error(errc::kValidation, "criteria entries must be strings");
    const Criterion parsed = checked("criteria", [&] { return parse_criterion(c.get<std::string>()); });
    if (std::find(out.begin(), out.end(), parsed) != out.end()) {
      throw Error(errc::kValidation, "criterion listed twice: " + c.get<std::string>());
    }
    out.push_back(parsed);
  }
  return out;
}

Genome parse_genome(const Json& j) {
  return checked("genome", [&] {
    if (!j.is_array() || j.empty()) throw Error(errc::kValidation, "must be a non-empty array of points");
    return j.get<Genome>();
  });
}

CriteriaContext make_context(const Workspace& ws, const TargetArea& area) {
  const auto points = incident_points(ws.window_fires);
  CriteriaConfig cc{ws.config.travel, ws.config.k_minutes, ws.config.include_existing};
  return {points, ws.stations, area, ws.grid, cc};
}

TargetArea parse_area(const Json& body, const Workspace& ws) {
  if (!body.contains("area")) throw Error(errc::kValidation, "missing 'area'");
  return checked("area", [&] { return target_area_from_json(body.at("area"), ws.grid); });
}

}  // namespace

AppConfig config_from_json(const Json& j, const fs::path& base_dir) {
  return checked("config", [&] {
    if (!j.is_object()) throw Error(errc::kValidation, "must be a JSON object");
    AppConfig c;
    const Json& data = j.at("data");
    c.fires_csv = resolve(base_dir, data.at("fires").get<std::string>());
    c.stations_csv = resolve(base_dir, data.at("stations").get<std::string>());
    if (data.contains("features") && !data.at("features").is_null()) {
      c.features_csv = resolve(base_dir, data.at("features").get<std::string>());
    }
    if (j.contains("grid") && !j.at("grid").is_null()) c.grid = j.at("grid").get<GridSpec>();
    c.cell_size_km = j.value("cell_size_km", c.cell_size_km);
    c.grid_margin_cells = j.value("grid_margin_cells", c.grid_margin_cells);
    if (j.contains("window") && !j.at("window").is_null()) {
      c.window = MonthWindow{j.at("window").at("start").get<YearMonth>(), j.at("window").at("end").get<YearMonth>()};
      if (c.window->end < c.window->start) throw Error(errc::kValidation, "window end precedes start");
    }
    if (j.contains("travel")) {
      c.travel.speed_kmh = j.at("travel").value("speed_kmh", c.travel.speed_kmh);
      c.travel.detour_factor = j.at("travel").value("detour_factor", c.travel.detour_factor);
    }
    validate(c.travel);
    c.k_minutes = j.value("k_minutes", c.k_minutes);
    if (!(c.k_minutes > 0.0)) throw Error(errc::kValidation, "k_minutes must be > 0");
    c.include_existing = j.value("include_existing", c.include_existing);
    if (j.contains("forecast")) {
      const Json& f = j.at("forecast");
      c.forecast_enabled = f.value("enabled", c.forecast_enabled);
      c.forecast.history = f.value("history", c.forecast.history);
      c.forecast.horizon = f.value("horizon", c.forecast.horizon);
      c.forecast.ridge = f.value("ridge", c.forecast.ridge);
    }
    validate(c.forecast);
    if (j.contains("simulate")) {
      const Json& s = j.at("simulate");
      if (s.contains("bucketing")) c.bucketing = parse_bucketing(s.at("bucketing").get<std::string>());
      c.transfer_backup = s.value("transfer_backup", c.transfer_backup);
    }
    if (j.contains("ga")) c.ga = j.at("ga").get<GAConfig>();
    validate(c.ga);
    if (j.contains("service")) {
      const Json& s = j.at("service");
      c.host = s.value("host", c.host);
      c.port = s.value("port", c.port);
      c.workers = s.value("workers", c.workers);
    }
    if (c.workers < 1) throw Error(errc::kValidation, "service.workers must be >= 1");
    return c;
  });
}

AppConfig load_config(const fs::path& file) {
  auto in = open_input(file);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(errc::kParse, "config '" + file.string() + "': " + e.what());
  }
  return config_from_json(j, file.parent_path());
}

Json to_json(const AppConfig& c) {
  Json j{{"data", {{"fires", c.fires_csv.string()}, {"stations", c.stations_csv.string()}}},
         {"cell_size_km", c.cell_size_km},
         {"travel", {{"speed_kmh", c.travel.speed_kmh}, {"detour_factor", c.travel.detour_factor}}},
         {"k_minutes", c.k_minutes},
         {"include_existing", c.include_existing},
         {"forecast",
          {{"enabled", c.forecast_enabled},
           {"history", c.forecast.history},
           {"horizon", c.forecast.horizon},
           {"ridge", c.forecast.ridge}}},
         {"simulate", {{"bucketing", to_string(c.bucketing)}, {"transfer_backup", c.transfer_backup}}},
         {"ga", c.ga}};
  j["data"]["features"] = c.features_csv ? Json(c.features_csv->string()) : Json(nullptr);
  j["grid"] = c.grid ? Json(*c.grid) : Json(nullptr);
  j["window"] = c.window ? Json{{"start", c.window->start}, {"end", c.window->end}} : Json(nullptr);
  return j;
}

std::shared_ptr<const Workspace> Workspace::load(const AppConfig& cfg) {
  auto ws = std::make_shared<Workspace>();
  ws->config = cfg;
  {
    auto in = open_input(cfg.fires_csv);
    auto r = parse_fire_records(in);
    ws->fires = std::move(r.items);
    ws->fire_rejects = std::move(r.rejects);
  }
  {
    auto in = open_input(cfg.stations_csv);
    auto r = parse_stations(in);
    ws->stations = std::move(r.items);
    ws->station_rejects = std::move(r.rejects);
  }
  if (cfg.features_csv) {
    auto in = open_input(*cfg.features_csv);
    auto r = parse_feature_tables(in);
    ws->features = std::move(r.items);
    ws->feature_rejects = std::move(r.rejects);
  }
  ws->unknown_stations = unknown_station_refs(ws->fires, ws->stations);

  if (cfg.grid) {
    ws->grid = *cfg.grid;
  } else {
    std::vector<GeoPoint> pts;
    for (const auto& f : ws->fires) pts.push_back(f.location);
    for (const auto& s : ws->stations) pts.push_back(s.location);
    if (pts.empty()) throw Error(errc::kValidation, "no grid configured and no data to fit one");
    ws->grid = fit_grid(pts, cfg.cell_size_km, cfg.grid_margin_cells);
  }

  if (cfg.window) {
    ws->window = *cfg.window;
  } else if (!ws->fires.empty()) {
    YearMonth lo = YearMonth::of(ws->fires[0].alarm_time), hi = lo;
    for (const auto& f : ws->fires) {
      lo = std::min(lo, YearMonth::of(f.alarm_time));
      hi = std::max(hi, YearMonth::of(f.alarm_time));
    }
    ws->window = {lo, hi};
  }
  for (const auto& f : ws->fires) {
    const YearMonth m = YearMonth::of(f.alarm_time);
    if (!(m < ws->window.start) && !(ws->window.end < m)) ws->window_fires.push_back(f);
  }

  if (cfg.window || !ws->fires.empty()) {
    auto raster = rasterize(ws->fires, ws->features, ws->grid, ws->window);
    ws->incidents = raster.incidents;
    ws->skipped_out_of_extent = raster.skipped_out_of_extent;
    ws->skipped_out_of_window = raster.skipped_out_of_window;
    ws->tensor = std::move(raster.tensor);
  }

  if (cfg.forecast_enabled) {
    if (!ws->tensor) {
      ws->forecast_status = "no fire records";
    } else {
      try {
        ws->model = fit_model(*ws->tensor, cfg.forecast);
        ws->attribution = attribute(*ws->model, *ws->tensor);
        ws->forecast_status = "ok";
      } catch (const Error& e) {
        ws->model.reset();
        ws->forecast_status = e.what();
      }
    }
  }

  ws->demand = cell_demand(ws->window_fires, ws->grid);
  if (!ws->stations.empty()) ws->field = reachability_field(ws->stations, ws->grid, cfg.travel);
  return ws;
}

Json ingest_summary(const Workspace& ws) {
  const auto rejects = [](const std::vector<RowReject>& r) {
    Json out = Json::array();
    for (const auto& x : r) out.push_back({{"line", x.line}, {"reason", x.reason}});
    return out;
  };
  Json feats = Json::array();
  for (const auto& f : ws.features) feats.push_back({{"feature", f.feature}, {"granularity", to_string(f.granularity)}});
  Json j{{"grid", ws.grid},
         {"records", ws.fires.size()},
         {"stations", ws.stations.size()},
         {"incidents_rasterized", ws.incidents},
         {"skipped_out_of_extent", ws.skipped_out_of_extent},
         {"skipped_out_of_window", ws.skipped_out_of_window},
         {"unknown_station_ids", ws.unknown_stations},
         {"features", std::move(feats)},
         {"rejects",
          {{"fires", rejects(ws.fire_rejects)},
           {"stations", rejects(ws.station_rejects)},
           {"features", rejects(ws.feature_rejects)}}},
         {"forecast_status", ws.forecast_status}};
  j["window"] = ws.tensor ? Json{{"start", ws.window.start}, {"end", ws.window.end}} : Json(nullptr);
  j["channels"] = ws.tensor ? Json(ws.tensor->channels()) : Json::array();
  return j;
}

Json reachability_payload(const Workspace& ws, double k) {
  if (!(k > 0.0)) throw Error(errc::kValidation, "k must be > 0");
  if (!ws.field) throw Error(errc::kNotFound, "no stations loaded");
  Json j = to_json(*ws.field);
  j["k_minutes"] = k;
  j["boundary"] = to_geojson(boundary(*ws.field, k));
  return j;
}

Json underserved_payload(const Workspace& ws, double k) {
  if (!(k > 0.0)) throw Error(errc::kValidation, "k must be > 0");
  if (!ws.field) throw Error(errc::kNotFound, "no stations loaded");
  const auto rep = underserved(*ws.field, ws.demand.fire_count, ws.demand.avg_response_min, k);
  return {{"k_minutes", k}, {"cells", to_json(rep)}};
}

Json grid_payload(const Workspace& ws, const std::optional<YearMonth>& month) {
  if (!ws.tensor) throw Error(errc::kNotFound, "no tensor loaded");
  const auto& t = *ws.tensor;
  const YearMonth m = month.value_or(t.timestamps().back());
  const auto ti = t.time_index(m);
  if (!ti) throw Error(errc::kNotFound, "month " + m.to_string() + " is outside the data window");
  Json channels = Json::object();
  for (std::size_t c = 0; c < t.channels().size(); ++c) {
    const auto plane = t.plane(*ti, c);
    channels[t.channels()[c]] = std::vector<double>(plane.begin(), plane.end());
  }
  Json attribution = nullptr;
  if (ws.attribution) {
    const auto& fr = *ws.attribution;
    const auto it = std::find(fr.timestamps().begin(), fr.timestamps().end(), m);
    if (it != fr.timestamps().end()) {
      const auto at = static_cast<std::size_t>(it - fr.timestamps().begin());
      std::vector<double> predicted(fr.cell_count()), abs_sum(fr.cell_count());
      Json phi = Json::object();
      for (std::size_t cell = 0; cell < fr.cell_count(); ++cell) {
        predicted[cell] = fr.predicted(at, cell);
        abs_sum[cell] = fr.abs_phi_sum(at, cell);
      }
      for (std::size_t f = 0; f < fr.features().size(); ++f) {
        std::vector<double> row(fr.cell_count());
        for (std::size_t cell = 0; cell < fr.cell_count(); ++cell) row[cell] = fr.phi(at, f, cell);
        phi[fr.features()[f]] = std::move(row);
      }
      attribution = {{"predicted", std::move(predicted)}, {"abs_phi_sum", std::move(abs_sum)}, {"phi", std::move(phi)}};
    }
  }
  return {{"grid", ws.grid},
          {"layout", "row-major, row 0 = south"},
          {"month", m},
          {"channels", std::move(channels)},
          {"attribution", std::move(attribution)}};
}

Json sd_series_payload(const Workspace& ws) {
  if (!ws.attribution || !ws.tensor) throw Error(errc::kNotFound, "forecast unavailable: " + ws.forecast_status);
  const auto series = sd_series(*ws.attribution, *ws.tensor);
  std::vector<std::string> features(ws.attribution->features().begin(), ws.attribution->features().end());
  Json j = sd_series_json(series, features);
  j["response_distribution"] = to_json(response_distribution(ws.window_fires));
  Json commissions = Json::array();
  for (const auto& s : ws.stations) commissions.push_back({{"id", s.id}, {"commissioned", format_date(s.commissioned)}});
  j["commissions"] = std::move(commissions);
  return j;
}

Json forecast_payload(const Workspace& ws) {
  if (!ws.model || !ws.tensor) throw Error(errc::kNotFound, "forecast unavailable: " + ws.forecast_status);
  const auto pred = predict(*ws.model, *ws.tensor, ws.config.forecast.horizon);
  return {{"config",
           {{"history", ws.config.forecast.history},
            {"horizon", ws.config.forecast.horizon},
            {"ridge", ws.config.forecast.ridge}}},
          {"prediction", {{"months", pred.months}, {"counts", pred.counts}}},
          {"attribution", attribution_to_json(*ws.attribution, *ws.tensor, true)}};
}

Json station_profile_payload(const Workspace& ws, const std::string& id, double k, int sector_hours) {
  if (!(k > 0.0)) throw Error(errc::kValidation, "k must be > 0");
  return to_json(station_profile(ws.window_fires, ws.stations, id, k, sector_hours));
}

OptimizeRequest parse_optimize_request(const Json& body, const Workspace& ws) {
  if (!body.is_object()) throw Error(errc::kValidation, "request body must be an object");
  OptimizeRequest req;
  const TargetArea area = parse_area(body, ws);
  req.area_json = body.at("area");
  if (!body.contains("criteria")) throw Error(errc::kValidation, "missing 'criteria'");
  req.criteria = parse_criteria(body.at("criteria"));
  req.k_new = checked("k_new", [&] { return body.value("k_new", 1); });
  if (req.k_new < 1) throw Error(errc::kValidation, "k_new must be >= 1");
  req.ga = ws.config.ga;
  if (body.contains("ga_config") && !body.at("ga_config").is_null()) {
    checked("ga_config", [&] { from_json(body.at("ga_config"), req.ga); });
  }
  if (body.contains("seed") && !body.at("seed").is_null()) {
    req.ga.seed = checked("seed", [&] { return body.at("seed").get<std::uint64_t>(); });
  }
  checked("ga_config", [&] { validate(req.ga); });
  checked("area", [&] { make_context(ws, area); });  // fires-in-area check
  return req;
}

Json run_optimize(const Workspace& ws, const OptimizeRequest& req, const ProgressFn& progress) {
  const auto ctx = make_context(ws, target_area_from_json(req.area_json, ws.grid));
  const auto result = run({&ctx, req.criteria, req.k_new}, req.ga, progress);
  Json j = to_json(result);
  j["area"] = req.area_json;
  j["k_minutes"] = ws.config.k_minutes;
  j["include_existing"] = ws.config.include_existing;
  return j;
}

Json evaluate_payload(const Workspace& ws, const Json& body) {
  if (!body.is_object()) throw Error(errc::kValidation, "request body must be an object");
  const auto ctx = checked("area", [&] { return make_context(ws, parse_area(body, ws)); });
  if (!body.contains("criteria")) throw Error(errc::kValidation, "missing 'criteria'");
  const auto criteria = parse_criteria(body.at("criteria"));
  if (!body.contains("genome")) throw Error(errc::kValidation, "missing 'genome'");
  const Genome g = parse_genome(body.at("genome"));
  const auto values = checked("genome", [&] { return ctx.evaluate(g, criteria); });
  Json obj = Json::object();
  for (std::size_t i = 0; i < criteria.size(); ++i) obj[std::string(to_string(criteria[i]))] = values[i];
  return {{"genome", g}, {"objectives", std::move(obj)}};
}

SimulateRequest parse_simulate_request(const Json& body, const Workspace& ws) {
  if (!body.is_object()) throw Error(errc::kValidation, "request body must be an object");
  SimulateRequest req;
  req.bucketing = ws.config.bucketing;
  req.transfer_backup = ws.config.transfer_backup;
  if (body.contains("bucketing")) {
    req.bucketing = checked("bucketing", [&] { return parse_bucketing(body.at("bucketing").get<std::string>()); });
  }
  req.transfer_backup = checked("transfer_backup", [&] { return body.value("transfer_backup", req.transfer_backup); });
  if (body.contains("genome")) {
    req.solutions.emplace_back("solution-1", parse_genome(body.at("genome")));
  } else if (body.contains("solutions") && body.at("solutions").is_array()) {
    const Json& sols = body.at("solutions");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < sols.size(); ++i) {
      const Json& s = sols[i];
      std::string id = "solution-" + std::to_string(i + 1);
      Genome g;
      if (s.is_array()) {
        g = parse_genome(s);
      } else {
        if (!s.is_object() || !s.contains("genome")) throw Error(errc::kValidation, "each solution needs a genome");
        if (s.contains("id")) id = checked("solution id", [&] { return s.at("id").get<std::string>(); });
        g = parse_genome(s.at("genome"));
      }
      if (!ids.insert(id).second) throw Error(errc::kValidation, "duplicate solution id '" + id + "'");
      req.solutions.emplace_back(std::move(id), std::move(g));
    }
  }
  if (req.solutions.empty()) throw Error(errc::kValidation, "no solutions to simulate");
  return req;
}

Json run_simulate(const Workspace& ws, const SimulateRequest& req) {
  SimConfig cfg{ws.config.travel, req.bucketing, req.transfer_backup};
  std::vector<std::pair<std::string, TransferSimReport>> reports;
  Json out = Json::array();
  for (const auto& [id, genome] : req.solutions) {
    auto rep = simulate_transfers(ws.window_fires, ws.stations, genome, cfg);
    out.push_back({{"solution_id", id}, {"report", to_json(rep)}});
    reports.emplace_back(id, std::move(rep));
  }
  return {{"bucketing", to_string(req.bucketing)},
          {"transfer_backup", req.transfer_backup},
          {"reports", std::move(out)},
          {"comparison", to_json(compare(reports))}};
}

}  // namespace stationplan
