#include <doctest.h>

#include "stationplan/app.hpp"
#include "stationplan/error.hpp"
#include "support/workspace.hpp"

using namespace stationplan;
using namespace stationplan::testing;

namespace {

Json minimal() { return {{"data", {{"fires", "f.csv"}, {"stations", "s.csv"}}}}; }

std::string error_code(const Json& j) {
  try {
    config_from_json(j, "/base");
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

}  // namespace

TEST_CASE("config defaults and relative paths") {
  const auto c = config_from_json(minimal(), "/base");
  CHECK(c.fires_csv == "/base/f.csv");
  CHECK(c.stations_csv == "/base/s.csv");
  CHECK_FALSE(c.features_csv);
  CHECK(c.k_minutes == 9.0);
  CHECK(c.travel.speed_kmh == 40.0);
  CHECK(c.travel.detour_factor == 1.4);
  CHECK(c.ga.population == 100);
  CHECK(c.bucketing == Bucketing::Quarter);

  Json j = minimal();
  j["data"]["fires"] = "/abs/f.csv";
  CHECK(config_from_json(j, "/base").fires_csv == "/abs/f.csv");
}

TEST_CASE("config round trip") {
  Json j = minimal();
  j["k_minutes"] = 12.0;
  j["window"] = {{"start", "2014-02"}, {"end", "2014-11"}};
  j["ga"] = {{"population", 20}, {"generations", 5}, {"seed", 9}};
  j["simulate"] = {{"bucketing", "month"}};
  const auto c = config_from_json(j, "/base");
  const auto again = config_from_json(to_json(c), "/elsewhere");
  CHECK(again.fires_csv == c.fires_csv);
  CHECK(again.k_minutes == 12.0);
  CHECK(again.window->start.to_string() == "2014-02");
  CHECK(again.ga.seed == 9);
  CHECK(again.bucketing == Bucketing::Month);
}

TEST_CASE("bad configs are validation errors") {
  CHECK(error_code(Json::array()) == "validation_error");
  CHECK(error_code(Json{{"data", {{"fires", "f.csv"}}}}) == "validation_error");
  Json j = minimal();
  j["k_minutes"] = 0;
  CHECK(error_code(j) == "validation_error");
  j = minimal();
  j["ga"] = {{"population", 7}};
  CHECK(error_code(j) == "validation_error");
  j = minimal();
  j["window"] = {{"start", "2015-01"}, {"end", "2014-01"}};
  CHECK(error_code(j) == "validation_error");
  j = minimal();
  j["simulate"] = {{"bucketing", "decade"}};
  CHECK(error_code(j) == "validation_error");
  j = minimal();
  j["travel"] = {{"speed_kmh", -1}};
  CHECK(error_code(j) == "validation_error");
}

TEST_CASE("workspace over the replay fixture") {
  ScratchDir dir;
  const auto fx = three_fire_fixture();
  const auto ws = Workspace::load(write_dataset(dir, fx.fires, fx.existing));
  CHECK(ws->fires.size() == 3);
  CHECK(ws->window_fires.size() == 3);
  CHECK(ws->window.start.to_string() == "2014-01");
  CHECK(ws->window.end.to_string() == "2014-03");
  CHECK(ws->incidents == 3);
  REQUIRE(ws->field);
  const Json s = ingest_summary(*ws);
  CHECK(s["records"] == 3);
  CHECK(s["stations"] == 1);
  CHECK(s["unknown_station_ids"].empty());
}

TEST_CASE("missing dataset file is an io error") {
  ScratchDir dir;
  AppConfig cfg;
  cfg.fires_csv = dir / "absent.csv";
  cfg.stations_csv = dir / "absent2.csv";
  try {
    Workspace::load(cfg);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.code()) == errc::kIo);
  }
}

TEST_CASE("simulate request forms") {
  ScratchDir dir;
  const auto fx = three_fire_fixture();
  const auto ws = Workspace::load(write_dataset(dir, fx.fires, fx.existing));
  const Json pt = {fx.solution[0].lng, fx.solution[0].lat};
  auto r = parse_simulate_request({{"genome", {pt}}}, *ws);
  REQUIRE(r.solutions.size() == 1);
  CHECK(r.solutions[0].first == "solution-1");
  r = parse_simulate_request({{"solutions", {{pt}, {{"id", "x"}, {"genome", {pt}}}}}, {"bucketing", "year"}}, *ws);
  REQUIRE(r.solutions.size() == 2);
  CHECK(r.solutions[1].first == "x");
  CHECK(r.bucketing == Bucketing::Year);
  CHECK_THROWS_AS(parse_simulate_request({{"bucketing", "year"}}, *ws), Error);
  CHECK_THROWS_AS(parse_simulate_request({{"genome", Json::array()}}, *ws), Error);
}
