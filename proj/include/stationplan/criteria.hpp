#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stationplan/geo.hpp"
#include "stationplan/json_io.hpp"
#include "stationplan/mobility.hpp"
#include "stationplan/records.hpp"

namespace stationplan {

enum class Criterion { ART, MRT, ATD, MTD, SO };

inline constexpr Criterion kAllCriteria[] = {Criterion::ART, Criterion::MRT, Criterion::ATD,
                                             Criterion::MTD, Criterion::SO};

std::string_view to_string(Criterion c) noexcept;
/// Accepts the upper-case names; throws Error(invalid_argument) otherwise.
Criterion parse_criterion(std::string_view s);

struct BoundingBox {
  double min_lat = 0.0, min_lng = 0.0, max_lat = 0.0, max_lng = 0.0;
};

/// Decision space for new stations: a simple polygon or a set of grid cells.
class TargetArea {
 public:
  /// The ring may repeat its first vertex.  Throws Error(validation_error)
  /// for fewer than 3 vertices, zero area or self-intersection.
  static TargetArea polygon(std::vector<GeoPoint> ring);
  /// Throws on an empty set or cells outside the grid.
  static TargetArea cells(std::vector<CellIndex> cells, const GridSpec& grid);

  bool is_polygon() const noexcept { return !grid_.has_value(); }
  const std::vector<GeoPoint>& ring() const noexcept { return ring_; }
  const std::vector<CellIndex>& cell_set() const noexcept { return cells_; }

  bool contains(const GeoPoint& p) const;
  const BoundingBox& bbox() const noexcept { return bbox_; }
  /// A point guaranteed to lie inside: the centroid when it does, otherwise
  /// a point found by scanning.
  const GeoPoint& interior_point() const noexcept { return interior_; }

 private:
  TargetArea() = default;
  void finish();

  std::vector<GeoPoint> ring_;     // open ring, polygon mode
  std::vector<CellIndex> cells_;   // sorted unique, cell mode
  std::vector<bool> cell_mask_;
  std::optional<GridSpec> grid_;
  BoundingBox bbox_;
  GeoPoint interior_;
};

void to_json(Json& j, const TargetArea& a);
/// {"polygon": [[lat,lng] | {lat,lng}, ...]} or {"cells": [[r,c], ...]}; cells need `grid`.
TargetArea target_area_from_json(const Json& j, const std::optional<GridSpec>& grid);

struct Responder {
  std::size_t index = 0;  // into the station list given
  double minutes = 0.0;
  double km = 0.0;
};

/// Nearest station by travel time; ties go to the lexicographically smallest id.
/// Throws Error(invalid_argument) on an empty set.
Responder responder(const GeoPoint& fire, std::span<const Station> stations, const TravelParams& p);

struct CriteriaConfig {
  TravelParams travel;
  double k_minutes = 9.0;
  /// When false only the new stations respond to fires (ART..MTD).
  bool include_existing = true;
};
void validate(const CriteriaConfig& c);

/// Precomputed state for repeated evaluation of candidate layouts over a
/// fixed set of fires, existing stations and target area.  Immutable after
/// construction, so concurrent evaluate calls are safe.
class CriteriaContext {
 public:
  /// Keeps only fires inside the area; throws Error(validation_error) when
  /// none remain.  `grid` is the cell universe for service overlap.
  CriteriaContext(std::span<const GeoPoint> fires, std::vector<Station> existing, TargetArea area,
                  GridSpec grid, CriteriaConfig cfg);

  const TargetArea& area() const noexcept { return area_; }
  const GridSpec& grid() const noexcept { return grid_; }
  const CriteriaConfig& config() const noexcept { return cfg_; }
  const std::vector<GeoPoint>& fires() const noexcept { return fires_; }
  const std::vector<Station>& existing() const noexcept { return existing_; }

  /// Objective values in the order of `which`.  Throws Error(validation_error)
  /// when a candidate lies outside the area or the list is empty.
  std::vector<double> evaluate(std::span<const GeoPoint> x, std::span<const Criterion> which) const;

  /// Cells whose centre is within k minutes of any point in x, sorted.
  std::vector<std::size_t> reachable_cells(std::span<const GeoPoint> x) const;

 private:
  std::vector<GeoPoint> fires_;
  std::vector<Station> existing_;
  TargetArea area_;
  GridSpec grid_;
  CriteriaConfig cfg_;
  std::vector<double> existing_best_min_;  // per fire, +inf without existing stations
  std::vector<bool> existing_reach_;      // per cell
};

/// Candidate stations named N1, N2, ... in genome order.
std::vector<Station> new_stations(std::span<const GeoPoint> x);

/// One point per distinct incident id (first occurrence).
std::vector<GeoPoint> incident_points(std::span<const FireRecord> records);

}  // namespace stationplan
