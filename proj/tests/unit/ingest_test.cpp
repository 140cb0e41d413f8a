#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "stationplan/error.hpp"
#include "stationplan/ingest.hpp"
#include "support/fixtures.hpp"

using namespace stationplan;
using namespace stationplan::testing;

namespace {

constexpr const char* kFireHeader = "id,lat,lng,alarm_time,response_time_min,station_id,role\n";

ParseResult<FireRecord> fires_from(const std::string& body) {
  std::istringstream in(std::string(kFireHeader) + body);
  return parse_fire_records(in);
}

}  // namespace

TEST_CASE("parse_fire_records accepts valid rows") {
  const auto r = fires_from(
      "f1,30.1,120.1,2015-03-02T18:40,12.5,S1,primary\n"
      "f2,30.2,120.2,2015-04-01T01:00:00,7,S2,backup\n"
      "f3,30.3,120.3,2016-01-01,0,S1,primary\n");
  CHECK(r.items.size() == 3);
  CHECK(r.rejects.empty());
}

TEST_CASE("parse_fire_records keeps values verbatim") {
  const auto r = fires_from("f1,30.1,120.1,2015-03-02T18:40,12.5,S1,primary\n");
  REQUIRE(r.items.size() == 1);
  const FireRecord& f = r.items[0];
  CHECK(f.id == "f1");
  CHECK(f.location == GeoPoint{30.1, 120.1});
  CHECK(f.alarm_time == at(2015, 3, 2, 18, 40));
  CHECK(f.response_time_min == 12.5);
  CHECK(f.responding_station_id == "S1");
  CHECK(f.role == Role::Primary);
}

TEST_CASE("parse_fire_records quarantines malformed rows") {
  const auto r = fires_from(
      "f1,30.1,120.1,2015-03-02T18:40,-1,S1,primary\n"
      "f2,30.1,120.1,2015-03-02T18:40,3,S1,chief\n"
      "f3,95,120.1,2015-03-02T18:40,3,S1,primary\n"
      "f4,30.1,120.1,not-a-date,3,S1,primary\n"
      "f5,30.1,120.1,2015-03-02T18:40,3,S1\n"
      "f6,30.1,120.1,2015-03-02T18:40,3,S1,backup\n");
  CHECK(r.items.size() == 1);
  REQUIRE(r.rejects.size() == 5);
  CHECK(r.rejects[0].line == 2);
  CHECK(r.rejects[0].reason == "negative response time");
  CHECK(r.rejects[1].reason == "unknown role");
  CHECK(r.rejects[2].reason == "coordinate out of range");
  CHECK(r.rejects[3].reason == "malformed alarm_time");
  CHECK(r.rejects[4].reason == "wrong number of fields");
}

TEST_CASE("parse_fire_records fails on a missing column") {
  std::istringstream in("id,lat,lng,alarm_time,station_id,role\nf1,30,120,2015-01-01,S1,primary\n");
  try {
    parse_fire_records(in);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::kParse);
    CHECK(std::string(e.what()).find("response_time_min") != std::string::npos);
  }
}

TEST_CASE("parse_fire_records handles quoted fields and CRLF") {
  const auto r = fires_from("\"f,1\",30.1,120.1,2015-03-02T18:40,1,\"S \"\"A\"\"\",primary\r\n");
  REQUIRE(r.items.size() == 1);
  CHECK(r.items[0].id == "f,1");
  CHECK(r.items[0].responding_station_id == "S \"A\"");
}

TEST_CASE("parse_stations") {
  SUBCASE("two distinct stations") {
    std::istringstream in("id,lat,lng,commissioned,staffing\nS1,30,120,2001-05-01,30\nS2,30.1,120.1,2010-01-01,\n");
    const auto r = parse_stations(in);
    REQUIRE(r.items.size() == 2);
    CHECK(r.items[0].staffing == 30);
    CHECK_FALSE(r.items[1].staffing);
    CHECK(format_date(r.items[0].commissioned) == "2001-05-01");
  }
  SUBCASE("duplicate id is fatal and names the id") {
    std::istringstream in("id,lat,lng,commissioned\nS1,30,120,2001-05-01\nS1,30.1,120.1,2010-01-01\n");
    try {
      parse_stations(in);
      FAIL("expected duplicate error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("'S1'") != std::string::npos);
    }
  }
  SUBCASE("staffing column absent") {
    std::istringstream in("id,lat,lng,commissioned\nS1,30,120,2001-05-01\n");
    const auto r = parse_stations(in);
    REQUIRE(r.items.size() == 1);
    CHECK_FALSE(r.items[0].staffing);
  }
}

TEST_CASE("unknown_station_refs lists dangling station ids") {
  const std::vector<Station> stations{station("S1", {30, 120})};
  const std::vector<FireRecord> fires{fire("a", {30, 120}, at(2015, 1, 1), 3, "S1"),
                                      fire("b", {30, 120}, at(2015, 1, 1), 3, "S9"),
                                      fire("c", {30, 120}, at(2015, 1, 1), 3, "S0")};
  CHECK(unknown_station_refs(fires, stations) == std::vector<std::string>{"S0", "S9"});
}

TEST_CASE("rasterize counts incidents per cell and month") {
  const GridSpec g{{30.0, 120.0}, 3.0, 2, 2};
  const MonthWindow w{{2015, 1}, {2015, 2}};

  SUBCASE("one fire in cell (0,0), month 0") {
    const std::vector<FireRecord> fires{fire("a", offset_km(g.origin, 1, 1), at(2015, 1, 5), 3, "S1")};
    const auto r = rasterize(fires, {}, g, w);
    CHECK(r.tensor.at(0, 0, CellIndex{0, 0}) == 1.0);
    double total = 0;
    for (double v : r.tensor.values()) total += v;
    CHECK(total == 1.0);
  }
  SUBCASE("no records") {
    const auto r = rasterize({}, {}, g, w);
    CHECK(r.tensor.time_count() == 2);
    CHECK(std::all_of(r.tensor.values().begin(), r.tensor.values().end(),
                      [](double v) { return v == 0.0; }));
  }
  SUBCASE("five fires over two cells and two months") {
    const GeoPoint c00 = offset_km(g.origin, 1, 1);
    const GeoPoint c11 = offset_km(g.origin, 4, 4);
    const std::vector<FireRecord> fires{
        fire("a", c00, at(2015, 1, 3), 3, "S1"), fire("b", c00, at(2015, 1, 9), 3, "S1"),
        fire("c", c11, at(2015, 1, 20), 3, "S1"), fire("d", c11, at(2015, 2, 1), 3, "S1"),
        fire("e", c11, at(2015, 2, 28, 23, 59), 3, "S1")};
    const auto r = rasterize(fires, {}, g, w);
    CHECK(r.tensor.at(0, 0, CellIndex{0, 0}) == 2.0);
    CHECK(r.tensor.at(0, 0, CellIndex{1, 1}) == 1.0);
    CHECK(r.tensor.at(1, 0, CellIndex{0, 0}) == 0.0);
    CHECK(r.tensor.at(1, 0, CellIndex{1, 1}) == 2.0);
    CHECK(r.incidents == 5);
  }
  SUBCASE("out-of-extent and out-of-window records are tallied") {
    const std::vector<FireRecord> fires{
        fire("a", offset_km(g.origin, 100, 1), at(2015, 1, 5), 3, "S1"),
        fire("b", offset_km(g.origin, 1, 1), at(2015, 3, 5), 3, "S1")};
    const auto r = rasterize(fires, {}, g, w);
    CHECK(r.skipped_out_of_extent == 1);
    CHECK(r.skipped_out_of_window == 1);
    CHECK(r.incidents == 0);
  }
  SUBCASE("records sharing an incident id count once") {
    const GeoPoint p = offset_km(g.origin, 1, 1);
    const std::vector<FireRecord> fires{fire("a", p, at(2015, 1, 5), 3, "S1"),
                                        fire("a", p, at(2015, 1, 5), 6, "S2", Role::Backup)};
    const auto r = rasterize(fires, {}, g, w);
    CHECK(r.tensor.at(0, 0, CellIndex{0, 0}) == 1.0);
  }
}

TEST_CASE("rasterize conserves counts and ignores record order") {
  std::mt19937_64 rng(11);
  const GridSpec g{{30.0, 120.0}, 3.0, 5, 4};
  const MonthWindow w{{2014, 6}, {2015, 5}};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<FireRecord> fires;
    std::uniform_int_distribution<int> month(0, 13);
    std::map<std::pair<int, std::size_t>, int> brute;  // (t, cell) -> count
    std::size_t in_scope = 0;
    for (int k = 0; k < 200; ++k) {
      const GeoPoint p = random_point(rng, g.origin, 14.0, 17.0);  // some beyond the 12x15 km extent
      const YearMonth ym = YearMonth{2014, 5} + month(rng);
      fires.push_back(fire("f" + std::to_string(k), p, at(ym.year(), ym.month(), 10), 4, "S1"));
      const auto cell = cell_of(p, g);
      if (cell && ym >= w.start && ym <= w.end) {
        ++brute[{ym - w.start, g.flat(*cell)}];
        ++in_scope;
      }
    }
    const auto r = rasterize(fires, {}, g, w);
    double total = 0;
    for (double v : r.tensor.values()) total += v;
    CHECK(total == static_cast<double>(in_scope));
    for (const auto& [key, count] : brute) {
      CHECK(r.tensor.at(static_cast<std::size_t>(key.first), 0, key.second) == count);
    }
    std::shuffle(fires.begin(), fires.end(), rng);
    CHECK(rasterize(fires, {}, g, w).tensor == r.tensor);
  }
}

TEST_CASE("feature tables broadcast by granularity") {
  const GridSpec g{{30.0, 120.0}, 3.0, 1, 2};
  std::istringstream in(
      "feature,granularity,cell_i,cell_j,month,value\n"
      "avg_temperature,per_month_global,,,2015-01,5.5\n"
      "avg_temperature,per_month_global,,,2015-02,7\n"
      "avg_population_density,per_cell_static,0,0,,100\n"
      "avg_population_density,per_cell_static,0,1,,200\n"
      "precipitation_days,per_cell_per_month,0,0,2015-01,1\n"
      "precipitation_days,per_cell_per_month,0,1,2015-01,2\n"
      "precipitation_days,per_cell_per_month,0,0,2015-02,3\n"
      "precipitation_days,per_cell_per_month,0,1,2015-02,4\n"
      "precipitation_days,per_cell_per_month,0,1,2015-02,9\n");
  const auto parsed = parse_feature_tables(in);
  REQUIRE(parsed.items.size() == 3);
  REQUIRE(parsed.rejects.size() == 1);
  CHECK(parsed.rejects[0].reason == "duplicate key");

  const auto r = rasterize({}, parsed.items, g, {{2015, 1}, {2015, 2}});
  const auto& t = r.tensor;
  REQUIRE(t.channel_count() == 4);
  CHECK(t.channels()[1] == "avg_temperature");
  CHECK(t.at(0, 1, std::size_t{0}) == 5.5);
  CHECK(t.at(0, 1, std::size_t{1}) == 5.5);
  CHECK(t.at(1, 1, std::size_t{1}) == 7.0);
  CHECK(t.at(0, 2, std::size_t{1}) == 200.0);
  CHECK(t.at(1, 2, std::size_t{1}) == 200.0);
  CHECK(t.at(1, 3, std::size_t{0}) == 3.0);
  CHECK(t.at(1, 3, std::size_t{1}) == 4.0);
}

TEST_CASE("feature table referencing an unknown cell is fatal") {
  const GridSpec g{{30.0, 120.0}, 3.0, 1, 1};
  FeatureTable ft{"avg_population_density", Granularity::PerCellStatic, {}};
  ft.values[{0, 0, FeatureTable::kNoMonth}] = 1.0;
  ft.values[{3, 0, FeatureTable::kNoMonth}] = 1.0;
  const std::vector<FeatureTable> tables{ft};
  CHECK_THROWS_AS(rasterize({}, tables, g, {{2015, 1}, {2015, 1}}), Error);
}

TEST_CASE("serialized output re-ingests identically") {
  std::mt19937_64 rng(5);
  const GridSpec g{{30.0, 120.0}, 3.0, 3, 3};
  std::vector<FireRecord> fires;
  for (int k = 0; k < 50; ++k) {
    fires.push_back(fire("f" + std::to_string(k), random_point(rng, g.origin, 9, 9),
                         at(2015, 1 + k % 6, 1 + k % 27, k % 24, k % 60),
                         std::uniform_real_distribution<double>(0, 30)(rng), "S" + std::to_string(k % 3),
                         k % 4 == 0 ? Role::Backup : Role::Primary));
  }
  std::stringstream csv;
  write_fire_records(csv, fires);
  const auto reparsed = parse_fire_records(csv);
  CHECK(reparsed.rejects.empty());
  CHECK(reparsed.items == fires);

  FeatureTable temp{"avg_temperature", Granularity::PerMonthGlobal, {}};
  for (int m = 1; m <= 6; ++m) temp.values[{-1, -1, YearMonth{2015, m}.ordinal()}] = 0.1 * m + 1.0 / 3.0;
  const std::vector<FeatureTable> tables{temp};
  std::stringstream fcsv;
  write_feature_tables(fcsv, tables);
  const auto fparsed = parse_feature_tables(fcsv);
  REQUIRE(fparsed.items.size() == 1);
  CHECK(fparsed.items[0].values == temp.values);

  const auto tensor = rasterize(fires, tables, g, {{2015, 1}, {2015, 6}}).tensor;
  std::stringstream bin;
  write_tensor(bin, tensor);
  CHECK(read_tensor(bin) == tensor);
  CHECK(rasterize(reparsed.items, fparsed.items, g, {{2015, 1}, {2015, 6}}).tensor == tensor);

  std::vector<Station> stations{station("S1", {30.01, 120.02})};
  stations[0].staffing = 12;
  std::stringstream scsv;
  write_stations(scsv, stations);
  CHECK(parse_stations(scsv).items == stations);
}

TEST_CASE("read_tensor rejects truncated input") {
  const SpatioTemporalTensor t({{30.0, 120.0}, 3.0, 2, 2}, {{2015, 1}}, {"fire_count"});
  std::stringstream bin;
  write_tensor(bin, t);
  std::string s = bin.str();
  s.pop_back();
  std::istringstream cut(s);
  CHECK_THROWS_AS(read_tensor(cut), Error);
}
