#include "stationplan/json_io.hpp"

#include <charconv>
#include <cmath>

#include "stationplan/error.hpp"

namespace stationplan {

void to_json(Json& j, const GeoPoint& p) { j = Json{{"lat", p.lat}, {"lng", p.lng}}; }

void from_json(const Json& j, GeoPoint& p) {
  if (j.is_array() && j.size() == 2) {
    // GeoJSON order: [lng, lat]
    p.lng = j.at(0).get<double>();
    p.lat = j.at(1).get<double>();
  } else {
    p.lat = j.at("lat").get<double>();
    p.lng = j.at("lng").get<double>();
  }
  validate(p);
}

void to_json(Json& j, const CellIndex& c) { j = Json::array({c.row, c.col}); }

void from_json(const Json& j, CellIndex& c) {
  if (j.is_array()) {
    c.row = j.at(0).get<int>();
    c.col = j.at(1).get<int>();
  } else {
    c.row = j.at("row").get<int>();
    c.col = j.at("col").get<int>();
  }
}

void to_json(Json& j, const GridSpec& g) {
  j = Json{{"origin", g.origin}, {"cell_size_km", g.cell_size_km}, {"rows", g.rows}, {"cols", g.cols}};
}

void from_json(const Json& j, GridSpec& g) {
  g.origin = j.at("origin").get<GeoPoint>();
  g.cell_size_km = j.value("cell_size_km", 3.0);
  g.rows = j.at("rows").get<int>();
  g.cols = j.at("cols").get<int>();
  validate(g);
}

void to_json(Json& j, const YearMonth& ym) { j = ym.to_string(); }

void from_json(const Json& j, YearMonth& ym) {
  const auto parsed = YearMonth::parse(j.get<std::string>());
  if (!parsed) throw Error(errc::kParse, "expected YYYY-MM month, got " + j.dump());
  ym = *parsed;
}

void to_json(Json& j, const Station& s) {
  j = Json{{"id", s.id}, {"location", s.location}, {"commissioned", format_date(s.commissioned)}};
  j["staffing"] = s.staffing ? Json(*s.staffing) : Json(nullptr);
}

void to_json(Json& j, const FireRecord& r) {
  j = Json{{"id", r.id},
           {"location", r.location},
           {"alarm_time", format_timestamp(r.alarm_time)},
           {"response_time_min", r.response_time_min},
           {"station_id", r.responding_station_id},
           {"role", to_string(r.role)}};
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace stationplan
