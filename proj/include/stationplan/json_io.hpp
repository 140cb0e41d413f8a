#pragma once

// nlohmann::json conversions for the shared domain types.

#include <json.hpp>

#include "stationplan/geo.hpp"
#include "stationplan/records.hpp"
#include "stationplan/time.hpp"

namespace stationplan {

using Json = nlohmann::json;

void to_json(Json& j, const GeoPoint& p);
void from_json(const Json& j, GeoPoint& p);
void to_json(Json& j, const CellIndex& c);
void from_json(const Json& j, CellIndex& c);
void to_json(Json& j, const GridSpec& g);
void from_json(const Json& j, GridSpec& g);
void to_json(Json& j, const YearMonth& ym);
void from_json(const Json& j, YearMonth& ym);
void to_json(Json& j, const Station& s);
void to_json(Json& j, const FireRecord& r);

/// Shortest decimal text that round-trips the double.
std::string format_double(double v);

/// Replaces non-finite doubles with null (JSON has no infinity).
Json finite_or_null(double v);

}  // namespace stationplan
