#include <doctest.h>

#include <cmath>
#include <numbers>

#include "stationplan/error.hpp"
#include "stationplan/geo.hpp"
#include "stationplan/time.hpp"

using namespace stationplan;

namespace {

// Hand projection, written independently of to_local_km.
GeoPoint offset_km(GeoPoint origin, double east, double north) {
  const double lng_km = 111.32 * std::cos(origin.lat * std::numbers::pi / 180.0);
  return {origin.lat + north / 111.32, origin.lng + east / lng_km};
}

}  // namespace

TEST_CASE("cell_of maps the south-west corner to (0, 0)") {
  const GridSpec g{{30.0, 120.0}, 3.0, 2, 2};
  const auto c = cell_of(g.origin, g);
  REQUIRE(c);
  CHECK(*c == CellIndex{0, 0});
}

TEST_CASE("cell_of is absent beyond the grid extent") {
  const GridSpec g{{30.0, 120.0}, 3.0, 2, 2};
  CHECK_FALSE(cell_of(offset_km(g.origin, 1.0, 6.5), g));   // north of top edge
  CHECK_FALSE(cell_of(offset_km(g.origin, -0.01, 1.0), g));
  CHECK_FALSE(cell_of(offset_km(g.origin, 1.0, -0.01), g));
}

TEST_CASE("cell_of: 4 km east and 1 km north lands in column 1, row 0") {
  const GridSpec g{{30.0, 120.0}, 3.0, 2, 2};
  const auto c = cell_of(offset_km(g.origin, 4.0, 1.0), g);
  REQUIRE(c);
  CHECK(*c == CellIndex{0, 1});
}

TEST_CASE("shared edges belong to the east/north cell") {
  const GridSpec g{{30.0, 120.0}, 3.0, 2, 2};
  const GridCoord on_edge{1.0, 1.0};
  const auto c = cell_of(from_grid_coord(on_edge, g), g);
  REQUIRE(c);
  CHECK(*c == CellIndex{1, 1});
}

TEST_CASE("cell_center of a 1x1 2 km grid is 1 km north and 1 km east of the origin") {
  const GridSpec g{{30.0, 120.0}, 2.0, 1, 1};
  const GeoPoint expected = offset_km(g.origin, 1.0, 1.0);
  const GeoPoint c = cell_center(0, 0, g);
  CHECK(c.lat == doctest::Approx(expected.lat).epsilon(1e-14));
  CHECK(c.lng == doctest::Approx(expected.lng).epsilon(1e-14));
}

TEST_CASE("cell_center round-trips through cell_of on an 87x50 grid") {
  const GridSpec g{{30.05, 119.9}, 3.0, 87, 50};
  int mismatches = 0;
  for (int i = 0; i < g.rows; ++i) {
    for (int j = 0; j < g.cols; ++j) {
      const auto c = cell_of(cell_center(i, j, g), g);
      if (!c || *c != CellIndex{i, j}) ++mismatches;
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("adjacent column centres differ by one cell in easting") {
  const GridSpec g{{30.05, 119.9}, 3.0, 4, 4};
  const LocalKm a = to_local_km(cell_center(2, 1, g), g);
  const LocalKm b = to_local_km(cell_center(2, 2, g), g);
  CHECK(b.east - a.east == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(b.north == doctest::Approx(a.north).epsilon(1e-12));
}

TEST_CASE("cell_center rejects out-of-bounds indices") {
  const GridSpec g{{30.0, 120.0}, 3.0, 2, 2};
  CHECK_THROWS_AS(cell_center(2, 0, g), Error);
  CHECK_THROWS_AS(cell_center(0, -1, g), Error);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(validate(GridSpec{{30.0, 120.0}, 0.0, 2, 2}), Error);
  CHECK_THROWS_AS(validate(GridSpec{{30.0, 120.0}, 3.0, 0, 2}), Error);
  CHECK_THROWS_AS(validate(GridSpec{{95.0, 120.0}, 3.0, 2, 2}), Error);
  CHECK_NOTHROW(validate(GridSpec{{30.0, 120.0}, 3.0, 87, 50}));
}

TEST_CASE("haversine along a meridian agrees with the grid projection") {
  const GeoPoint a{30.0, 120.0};
  const GeoPoint b = offset_km(a, 0.0, 10.0);
  CHECK(haversine_km(a, b) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(haversine_km(a, a) == 0.0);
  CHECK(haversine_km(a, b) == haversine_km(b, a));
}

TEST_CASE("destination and bearing agree") {
  const GeoPoint a{30.0, 120.0};
  for (double brg : {0.0, 45.0, 90.0, 200.0, 330.0}) {
    const GeoPoint b = destination(a, brg, 5.0);
    CHECK(haversine_km(a, b) == doctest::Approx(5.0).epsilon(1e-10));
    const double diff = std::remainder(bearing_deg(a, b) - brg, 360.0);
    CHECK(std::abs(diff) < 1e-9);
  }
}

TEST_CASE("fit_grid covers every point with a margin") {
  const std::vector<GeoPoint> pts{{30.0, 120.0}, {30.2, 120.3}, {30.1, 119.95}};
  const GridSpec g = fit_grid(pts, 3.0, 1);
  for (const auto& p : pts) {
    const auto c = cell_of(p, g);
    REQUIRE(c);
    CHECK(c->row >= 1);
    CHECK(c->col >= 1);
    CHECK(c->row <= g.rows - 2);
    CHECK(c->col <= g.cols - 2);
  }
}

TEST_CASE("point_in_ring uses even-odd containment") {
  const std::vector<GeoPoint> square{{0, 0}, {0, 2}, {2, 2}, {2, 0}};
  CHECK(point_in_ring({1, 1}, square));
  CHECK_FALSE(point_in_ring({3, 1}, square));
  std::vector<GeoPoint> closed = square;
  closed.push_back(square.front());
  CHECK(point_in_ring({1, 1}, closed));
}

TEST_CASE("timestamps parse and format") {
  const auto t = parse_timestamp("2015-03-02T18:40");
  REQUIRE(t);
  CHECK(format_timestamp(*t) == "2015-03-02T18:40:00");
  CHECK(year_of(*t) == 2015);
  CHECK(hour_of(*t) == 18);
  CHECK(YearMonth::of(*t) == YearMonth{2015, 3});
  CHECK(parse_timestamp("2015-03-02 18:40:05Z"));
  CHECK_FALSE(parse_timestamp("2015-02-30"));
  CHECK_FALSE(parse_timestamp("2015-03-02T25:00"));
  CHECK_FALSE(parse_timestamp("yesterday"));
  CHECK(YearMonth::parse("2015-12")->to_string() == "2015-12");
  CHECK((YearMonth{2015, 12} + 1) == YearMonth{2016, 1});
  CHECK_FALSE(YearMonth::parse("2015-13"));
}
