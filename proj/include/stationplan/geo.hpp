#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace stationplan {

/// Kilometres per degree of latitude used by the local equirectangular
/// projection.  Longitude degrees scale by cos(origin latitude).
inline constexpr double kKmPerDegree = 111.32;

/// Sphere radius matching kKmPerDegree, so great-circle distances along a
/// meridian agree exactly with the grid projection.
inline constexpr double kEarthRadiusKm = kKmPerDegree * 180.0 / 3.14159265358979323846;

struct GeoPoint {
  double lat = 0.0;  // degrees, [-90, 90]
  double lng = 0.0;  // degrees, [-180, 180]

  bool operator==(const GeoPoint&) const = default;
};

bool is_valid(const GeoPoint& p) noexcept;
void validate(const GeoPoint& p);

struct CellIndex {
  int row = 0;  // 0 = southernmost
  int col = 0;  // 0 = westernmost

  auto operator<=>(const CellIndex&) const = default;
};

/// Uniform grid laid over a local equirectangular projection anchored at the
/// south-west corner.  Cells are half-open: [west, east) x [south, north).
struct GridSpec {
  GeoPoint origin;
  double cell_size_km = 3.0;
  int rows = 1;
  int cols = 1;

  bool operator==(const GridSpec&) const = default;

  std::size_t cell_count() const noexcept {
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  }
  bool contains(CellIndex c) const noexcept {
    return c.row >= 0 && c.row < rows && c.col >= 0 && c.col < cols;
  }
  /// Row-major flat index.
  std::size_t flat(CellIndex c) const noexcept {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(cols) +
           static_cast<std::size_t>(c.col);
  }
  CellIndex unflat(std::size_t k) const noexcept {
    return {static_cast<int>(k / static_cast<std::size_t>(cols)),
            static_cast<int>(k % static_cast<std::size_t>(cols))};
  }
};

void validate(const GridSpec& g);

/// Planar offset (kilometres east, kilometres north) from the grid origin.
struct LocalKm {
  double east = 0.0;
  double north = 0.0;
};

LocalKm to_local_km(const GeoPoint& p, const GridSpec& g) noexcept;
GeoPoint from_local_km(const LocalKm& km, const GridSpec& g) noexcept;

/// Fractional cell coordinates: (row + 0.5, col + 0.5) is a cell centre.
struct GridCoord {
  double row = 0.0;
  double col = 0.0;
};

GridCoord to_grid_coord(const GeoPoint& p, const GridSpec& g) noexcept;
GeoPoint from_grid_coord(const GridCoord& c, const GridSpec& g) noexcept;

std::optional<CellIndex> cell_of(const GeoPoint& p, const GridSpec& g) noexcept;

/// Throws Error(out_of_bounds) for indices outside the grid.
GeoPoint cell_center(int row, int col, const GridSpec& g);
inline GeoPoint cell_center(CellIndex c, const GridSpec& g) { return cell_center(c.row, c.col, g); }

/// Smallest grid (at the given cell size) whose extent covers every point,
/// with `margin_cells` of padding on each side.
GridSpec fit_grid(std::span<const GeoPoint> points, double cell_size_km, int margin_cells = 1);

double haversine_km(const GeoPoint& a, const GeoPoint& b) noexcept;

/// Initial great-circle bearing from `from` to `to`, degrees clockwise from
/// north in [0, 360).  Coincident points give 0.
double bearing_deg(const GeoPoint& from, const GeoPoint& to) noexcept;

/// Point `distance_km` away from `start` along `bearing` on the sphere.
GeoPoint destination(const GeoPoint& start, double bearing, double distance_km) noexcept;

/// Even-odd (crossing number) test treating lat/lng as planar coordinates.
/// The ring may or may not repeat its first vertex.
bool point_in_ring(const GeoPoint& p, std::span<const GeoPoint> ring) noexcept;

}  // namespace stationplan
