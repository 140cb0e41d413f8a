#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "stationplan/app.hpp"
#include "stationplan/error.hpp"
#include "stationplan/service.hpp"

namespace sp = stationplan;
namespace fs = std::filesystem;

namespace {

sp::Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sp::Error(sp::errc::kIo, "cannot open '" + path + "'");
  try {
    return sp::Json::parse(in);
  } catch (const sp::Json::exception& e) {
    throw sp::Error(sp::errc::kParse, "'" + path + "': " + e.what());
  }
}

void emit(const sp::Json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw sp::Error(sp::errc::kIo, "cannot write '" + out + "'");
  f << text;
  if (!f) throw sp::Error(sp::errc::kIo, "write failed for '" + out + "'");
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int fail(const std::string& code, const std::string& message, int status) {
  std::cerr << sp::error_json(code, message).dump() << "\n";
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fire station placement planner"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out;
  app.add_option("-c,--config", config_path, "Config JSON file")->required()->check(CLI::ExistingFile);

  auto* ingest = app.add_subcommand("ingest", "Load the datasets and report what was parsed");
  std::string tensor_out;
  ingest->add_option("--tensor-out", tensor_out, "Also write the rasterized tensor");
  ingest->add_option("-o,--out", out, "Output file (default stdout)");

  auto* forecast = app.add_subcommand("forecast", "Fit the forecaster and emit predictions with attributions");
  forecast->add_option("-o,--out", out);

  double k = 0.0;
  auto* reach = app.add_subcommand("reach", "Reachable region as GeoJSON");
  reach->add_option("--k", k, "Minutes")->required();
  reach->add_option("-o,--out", out);

  auto* under = app.add_subcommand("underserved", "Cells with fires outside the reachable region");
  under->add_option("--k", k, "Minutes")->required();
  under->add_option("-o,--out", out);

  auto* optimize = app.add_subcommand("optimize", "Search placements for new stations");
  std::string area_path, criteria = "ART,MRT,ATD,MTD,SO";
  int k_new = 1;
  std::optional<std::uint64_t> seed;
  std::optional<int> population, generations, threads;
  optimize->add_option("--area", area_path, "Target area JSON ({polygon} or {cells})")->required();
  optimize->add_option("--criteria", criteria, "Comma-separated subset of ART,MRT,ATD,MTD,SO")->capture_default_str();
  optimize->add_option("--k-new", k_new, "Stations to add")->capture_default_str();
  optimize->add_option("--seed", seed);
  optimize->add_option("--population", population);
  optimize->add_option("--generations", generations);
  optimize->add_option("--threads", threads);
  optimize->add_option("-o,--out", out);

  auto* simulate = app.add_subcommand("simulate", "Replay history with added stations");
  std::string solution_path, bucketing;
  bool backup = false;
  simulate->add_option("--solution", solution_path, "Solution or optimize result JSON")->required();
  simulate->add_option("--bucketing", bucketing, "month, quarter or year");
  simulate->add_flag("--transfer-backup", backup, "Also move backup roles");
  simulate->add_option("-o,--out", out);

  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  std::optional<int> port;
  std::optional<std::string> host;
  serve->add_option("--port", port);
  serve->add_option("--host", host);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("usage", e.what(), 2);
  }

  try {
    auto cfg = sp::load_config(config_path);
    if (serve->parsed()) {
      if (port) cfg.port = *port;
      if (host) cfg.host = *host;
    }
    const auto ws = sp::Workspace::load(cfg);

    if (ingest->parsed()) {
      if (!tensor_out.empty()) {
        if (!ws->tensor) throw sp::Error(sp::errc::kNotFound, "no tensor to write");
        std::ofstream f(tensor_out, std::ios::binary);
        if (!f) throw sp::Error(sp::errc::kIo, "cannot write '" + tensor_out + "'");
        sp::write_tensor(f, *ws->tensor);
      }
      emit(sp::ingest_summary(*ws), out);
    } else if (forecast->parsed()) {
      emit(sp::forecast_payload(*ws), out);
    } else if (reach->parsed()) {
      emit(sp::reachability_payload(*ws, k).at("boundary"), out);
    } else if (under->parsed()) {
      emit(sp::underserved_payload(*ws, k), out);
    } else if (optimize->parsed()) {
      sp::Json body{{"area", read_json_file(area_path)}, {"criteria", split_csv(criteria)}, {"k_new", k_new}};
      sp::Json ga = sp::Json::object();
      if (population) ga["population"] = *population;
      if (generations) ga["generations"] = *generations;
      if (threads) ga["threads"] = *threads;
      if (!ga.empty()) {
        sp::Json merged = ws->config.ga;
        merged.update(ga);
        body["ga_config"] = merged;
      }
      if (seed) body["seed"] = *seed;
      const auto req = sp::parse_optimize_request(body, *ws);
      emit(sp::run_optimize(*ws, req), out);
    } else if (simulate->parsed()) {
      sp::Json body = read_json_file(solution_path);
      if (!body.is_object()) throw sp::Error(sp::errc::kValidation, "solution file must hold a JSON object");
      if (!bucketing.empty()) body["bucketing"] = bucketing;
      if (backup) body["transfer_backup"] = true;
      emit(sp::run_simulate(*ws, sp::parse_simulate_request(body, *ws)), out);
    } else if (serve->parsed()) {
      sp::Api api(ws, cfg.workers);
      sp::HttpServer server(api);
      const int bound = server.bind(cfg.host, cfg.port);
      std::cout << sp::Json{{"listening", cfg.host + ":" + std::to_string(bound)}}.dump() << std::endl;
      server.listen();
    }
  } catch (const sp::Error& e) {
    return fail(e.code(), e.what(), 1);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
  return 0;
}
