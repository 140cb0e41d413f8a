#include "stationplan/geo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "stationplan/error.hpp"

namespace stationplan {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double km_per_degree_lng(const GridSpec& g) noexcept {
  return kKmPerDegree * std::cos(g.origin.lat * kDegToRad);
}

}  // namespace

bool is_valid(const GeoPoint& p) noexcept {
  return std::isfinite(p.lat) && std::isfinite(p.lng) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lng >= -180.0 && p.lng <= 180.0;
}

void validate(const GeoPoint& p) {
  if (!is_valid(p)) {
    throw Error(errc::kInvalidArgument, "coordinate out of range: (" + std::to_string(p.lat) +
                                            ", " + std::to_string(p.lng) + ")");
  }
}

void validate(const GridSpec& g) {
  validate(g.origin);
  if (!(g.cell_size_km > 0.0) || !std::isfinite(g.cell_size_km)) {
    throw Error(errc::kInvalidArgument, "grid cell_size_km must be > 0");
  }
  if (g.rows < 1 || g.cols < 1) {
    throw Error(errc::kInvalidArgument, "grid needs at least one row and one column");
  }
  if (std::abs(g.origin.lat) >= 89.0) {
    throw Error(errc::kInvalidArgument, "grid origin too close to a pole for local projection");
  }
}

LocalKm to_local_km(const GeoPoint& p, const GridSpec& g) noexcept {
  return {(p.lng - g.origin.lng) * km_per_degree_lng(g), (p.lat - g.origin.lat) * kKmPerDegree};
}

GeoPoint from_local_km(const LocalKm& km, const GridSpec& g) noexcept {
  return {g.origin.lat + km.north / kKmPerDegree, g.origin.lng + km.east / km_per_degree_lng(g)};
}

GridCoord to_grid_coord(const GeoPoint& p, const GridSpec& g) noexcept {
  const LocalKm km = to_local_km(p, g);
  return {km.north / g.cell_size_km, km.east / g.cell_size_km};
}

GeoPoint from_grid_coord(const GridCoord& c, const GridSpec& g) noexcept {
  return from_local_km({c.col * g.cell_size_km, c.row * g.cell_size_km}, g);
}

std::optional<CellIndex> cell_of(const GeoPoint& p, const GridSpec& g) noexcept {
  const GridCoord c = to_grid_coord(p, g);
  if (!std::isfinite(c.row) || !std::isfinite(c.col)) return std::nullopt;
  // Coordinates within kEdgeSnap of an edge are treated as on it, so points
  // built from exact edge positions land in the east/north cell.
  constexpr double kEdgeSnap = 1e-9;
  const double row = std::floor(c.row + kEdgeSnap);
  const double col = std::floor(c.col + kEdgeSnap);
  if (row < 0.0 || col < 0.0 || row >= g.rows || col >= g.cols) return std::nullopt;
  return CellIndex{static_cast<int>(row), static_cast<int>(col)};
}

GeoPoint cell_center(int row, int col, const GridSpec& g) {
  if (!g.contains({row, col})) {
    throw Error(errc::kOutOfBounds, "cell (" + std::to_string(row) + ", " + std::to_string(col) +
                                        ") outside " + std::to_string(g.rows) + "x" +
                                        std::to_string(g.cols) + " grid");
  }
  return from_grid_coord({row + 0.5, col + 0.5}, g);
}

GridSpec fit_grid(std::span<const GeoPoint> points, double cell_size_km, int margin_cells) {
  if (points.empty()) throw Error(errc::kInvalidArgument, "cannot fit a grid to zero points");
  if (!(cell_size_km > 0.0)) throw Error(errc::kInvalidArgument, "cell_size_km must be > 0");
  double min_lat = std::numeric_limits<double>::infinity();
  double min_lng = min_lat;
  double max_lat = -min_lat;
  double max_lng = -min_lat;
  for (const auto& p : points) {
    validate(p);
    min_lat = std::min(min_lat, p.lat);
    max_lat = std::max(max_lat, p.lat);
    min_lng = std::min(min_lng, p.lng);
    max_lng = std::max(max_lng, p.lng);
  }
  GridSpec g;
  g.cell_size_km = cell_size_km;
  g.origin = {min_lat, min_lng};
  // Shift the origin by whole cells so the margin is exact in projected space.
  const GeoPoint shifted = from_local_km({-margin_cells * cell_size_km, -margin_cells * cell_size_km}, g);
  g.origin = shifted;
  const GridCoord far = to_grid_coord({max_lat, max_lng}, g);
  g.rows = static_cast<int>(std::floor(far.row)) + 1 + margin_cells;
  g.cols = static_cast<int>(std::floor(far.col)) + 1 + margin_cells;
  return g;
}

double haversine_km(const GeoPoint& a, const GeoPoint& b) noexcept {
  const double lat1 = a.lat * kDegToRad;
  const double lat2 = b.lat * kDegToRad;
  const double dlat = lat2 - lat1;
  const double dlng = (b.lng - a.lng) * kDegToRad;
  const double s = std::sin(dlat / 2.0);
  const double t = std::sin(dlng / 2.0);
  const double h = s * s + std::cos(lat1) * std::cos(lat2) * t * t;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

double bearing_deg(const GeoPoint& from, const GeoPoint& to) noexcept {
  if (from == to) return 0.0;
  const double lat1 = from.lat * kDegToRad;
  const double lat2 = to.lat * kDegToRad;
  const double dlng = (to.lng - from.lng) * kDegToRad;
  const double y = std::sin(dlng) * std::cos(lat2);
  const double x = std::cos(lat1) * std::sin(lat2) - std::sin(lat1) * std::cos(lat2) * std::cos(dlng);
  double deg = std::atan2(y, x) / kDegToRad;
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

GeoPoint destination(const GeoPoint& start, double bearing, double distance_km) noexcept {
  const double delta = distance_km / kEarthRadiusKm;
  const double theta = bearing * kDegToRad;
  const double lat1 = start.lat * kDegToRad;
  const double lng1 = start.lng * kDegToRad;
  const double lat2 = std::asin(std::sin(lat1) * std::cos(delta) +
                                std::cos(lat1) * std::sin(delta) * std::cos(theta));
  const double lng2 = lng1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(lat1),
                                        std::cos(delta) - std::sin(lat1) * std::sin(lat2));
  return {lat2 / kDegToRad, lng2 / kDegToRad};
}

bool point_in_ring(const GeoPoint& p, std::span<const GeoPoint> ring) noexcept {
  std::size_t n = ring.size();
  if (n >= 2 && ring.front() == ring.back()) --n;
  if (n < 3) return false;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[j];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const double x = (b.lng - a.lng) * (p.lat - a.lat) / (b.lat - a.lat) + a.lng;
      if (p.lng < x) inside = !inside;
    }
  }
  return inside;
}

}  // namespace stationplan
