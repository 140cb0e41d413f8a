#pragma once

// Shared generators for unit and acceptance tests.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "stationplan/geo.hpp"
#include "stationplan/records.hpp"
#include "stationplan/time.hpp"

namespace stationplan::testing {

inline GeoPoint offset_km(GeoPoint origin, double east, double north) {
  const double lng_km = kKmPerDegree * std::cos(origin.lat * 3.14159265358979323846 / 180.0);
  return {origin.lat + north / kKmPerDegree, origin.lng + east / lng_km};
}

inline Timestamp at(int y, int m, int d, int hh = 12, int mm = 0) {
  using namespace std::chrono;
  return sys_days{year{y} / month{static_cast<unsigned>(m)} / day{static_cast<unsigned>(d)}} +
         hours{hh} + minutes{mm};
}

inline FireRecord fire(std::string id, GeoPoint where, Timestamp when, double response,
                       std::string station, Role role = Role::Primary) {
  return {std::move(id), where, when, response, std::move(station), role};
}

inline Station station(std::string id, GeoPoint where) {
  using namespace std::chrono;
  return {std::move(id), where, sys_days{year{2000} / January / day{1}}, std::nullopt};
}

/// Uniform point in [0, width_km) x [0, height_km) east/north of origin.
template <class Rng>
GeoPoint random_point(Rng& rng, GeoPoint origin, double width_km, double height_km) {
  std::uniform_real_distribution<double> ux(0.0, width_km);
  std::uniform_real_distribution<double> uy(0.0, height_km);
  const double e = ux(rng);
  const double n = uy(rng);
  return offset_km(origin, e, n);
}

}  // namespace stationplan::testing
