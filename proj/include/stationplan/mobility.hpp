#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stationplan/geo.hpp"
#include "stationplan/json_io.hpp"
#include "stationplan/records.hpp"

namespace stationplan {

/// Straight-line travel model: great-circle distance stretched by a detour
/// factor, driven at a constant speed.
struct TravelParams {
  double speed_kmh = 40.0;
  double detour_factor = 1.4;
};

void validate(const TravelParams& p);

/// Detoured road distance in kilometres.
double travel_distance_km(const GeoPoint& a, const GeoPoint& b, const TravelParams& p) noexcept;

/// Minutes to drive from a to b.  Symmetric; zero iff a == b.
double travel_time(const GeoPoint& a, const GeoPoint& b, const TravelParams& p) noexcept;

/// Minimum travel time from any station to each cell centre.
class ReachabilityField {
 public:
  ReachabilityField(GridSpec grid, std::vector<double> minutes);

  const GridSpec& grid() const noexcept { return grid_; }
  std::span<const double> minutes() const noexcept { return minutes_; }
  double at(CellIndex c) const { return minutes_.at(grid_.flat(c)); }
  double at(std::size_t cell) const { return minutes_.at(cell); }

  /// Row-major mask of cells with min time <= k.
  std::vector<bool> reachable(double k) const;

 private:
  GridSpec grid_;
  std::vector<double> minutes_;
};

/// Throws Error(invalid_argument) on an empty station set.
ReachabilityField reachability_field(std::span<const GeoPoint> stations, const GridSpec& grid,
                                     const TravelParams& p);
ReachabilityField reachability_field(std::span<const Station> stations, const GridSpec& grid,
                                     const TravelParams& p);

/// Closed contours separating cells reachable within k minutes from the rest.
/// Rings are oriented with the reachable side on the left (outer boundaries
/// counter-clockwise, holes clockwise) and each carries its nesting depth:
/// a cell centre inside an odd number of rings is reachable.  When every cell
/// is reachable `covers_extent` is set and there are no rings.
struct ReachableRegion {
  struct Ring {
    std::vector<GeoPoint> points;  // closed: last point repeats the first
    int depth = 0;                 // number of rings enclosing this one
    int parent = -1;               // index of the immediately enclosing ring
  };
  std::vector<Ring> rings;
  bool covers_extent = false;
  double k_minutes = 0.0;

  /// Even-odd containment against every ring, honouring covers_extent.
  bool contains(const GeoPoint& p) const;
};

/// Marching squares over the binary field (min time <= k) sampled at cell
/// centres, outside padded as unreachable.  Saddles join reachable corners.
ReachableRegion boundary(const ReachabilityField& field, double k);

/// GeoJSON MultiPolygon: one polygon per even-depth ring with its odd-depth
/// children as holes.  Coordinates are [lng, lat].
Json to_geojson(const ReachableRegion& region);

/// Historical demand per cell: distinct incidents and their mean response.
struct CellDemand {
  GridSpec grid;
  std::vector<double> fire_count;        // per cell
  std::vector<double> avg_response_min;  // per cell; 0 where no fires
};
CellDemand cell_demand(std::span<const FireRecord> records, const GridSpec& grid);

struct UnderservedCell {
  CellIndex cell;
  double fire_count = 0.0;
  double avg_response_min = 0.0;
  double min_time_min = 0.0;
  double score = 0.0;  // in [0, 1]
};

/// Cells beyond k minutes ranked by 0.5 * norm(fire_count) + 0.5 *
/// norm(avg_response), min-max normalized over the candidates (a degenerate
/// range normalizes to 1).  Ordered by score descending, then cell index.
std::vector<UnderservedCell> underserved(const ReachabilityField& field,
                                         std::span<const double> fire_counts,
                                         std::span<const double> avg_response, double k);

Json to_json(const ReachabilityField& field);
Json to_json(std::span<const UnderservedCell> report);

}  // namespace stationplan
