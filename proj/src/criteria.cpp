#include "stationplan/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "stationplan/error.hpp"

namespace stationplan {

std::string_view to_string(Criterion c) noexcept {
  switch (c) {
    case Criterion::ART: return "ART";
    case Criterion::MRT: return "MRT";
    case Criterion::ATD: return "ATD";
    case Criterion::MTD: return "MTD";
    case Criterion::SO: return "SO";
  }
  return "?";
}

Criterion parse_criterion(std::string_view s) {
  for (Criterion c : kAllCriteria) {
    if (to_string(c) == s) return c;
  }
  throw Error(errc::kInvalidArgument, "unknown criterion '" + std::string(s) + "'");
}

namespace {

double cross(const GeoPoint& o, const GeoPoint& a, const GeoPoint& b) {
  return (a.lng - o.lng) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lng - o.lng);
}

bool on_segment(const GeoPoint& a, const GeoPoint& b, const GeoPoint& p) {
  return std::min(a.lng, b.lng) <= p.lng && p.lng <= std::max(a.lng, b.lng) &&
         std::min(a.lat, b.lat) <= p.lat && p.lat <= std::max(a.lat, b.lat);
}

bool segments_intersect(const GeoPoint& a, const GeoPoint& b, const GeoPoint& c, const GeoPoint& d) {
  const double d1 = cross(c, d, a), d2 = cross(c, d, b);
  const double d3 = cross(a, b, c), d4 = cross(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  return (d1 == 0 && on_segment(c, d, a)) || (d2 == 0 && on_segment(c, d, b)) ||
         (d3 == 0 && on_segment(a, b, c)) || (d4 == 0 && on_segment(a, b, d));
}

// Widest inside interval along a horizontal line, or nullopt.
std::optional<GeoPoint> scan_line(const std::vector<GeoPoint>& ring, double lat) {
  std::vector<double> xs;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[j];
    if ((a.lat > lat) != (b.lat > lat)) xs.push_back((b.lng - a.lng) * (lat - a.lat) / (b.lat - a.lat) + a.lng);
  }
  std::sort(xs.begin(), xs.end());
  std::optional<GeoPoint> best;
  double width = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
    if (xs[i + 1] - xs[i] > width) {
      width = xs[i + 1] - xs[i];
      best = GeoPoint{lat, 0.5 * (xs[i] + xs[i + 1])};
    }
  }
  return best;
}

}  // namespace

TargetArea TargetArea::polygon(std::vector<GeoPoint> ring) {
  if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
  if (ring.size() < 3) throw Error(errc::kValidation, "target polygon needs at least 3 vertices");
  for (const auto& p : ring) {
    if (!is_valid(p)) throw Error(errc::kValidation, "target polygon has an invalid coordinate");
  }
  const std::size_t n = ring.size();
  double area2 = 0.0;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    area2 += ring[j].lng * ring[i].lat - ring[i].lng * ring[j].lat;
  }
  if (area2 == 0.0) throw Error(errc::kValidation, "target polygon has zero area");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) {
        if (ring[i] == ring[(i + 1) % n] || ring[j] == ring[(j + 1) % n]) {
          throw Error(errc::kValidation, "target polygon has repeated vertices");
        }
        continue;
      }
      if (segments_intersect(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n])) {
        throw Error(errc::kValidation, "target polygon is not simple");
      }
    }
  }
  TargetArea a;
  a.ring_ = std::move(ring);
  a.finish();
  return a;
}

TargetArea TargetArea::cells(std::vector<CellIndex> cells, const GridSpec& grid) {
  validate(grid);
  if (cells.empty()) throw Error(errc::kValidation, "target cell set is empty");
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  TargetArea a;
  a.cell_mask_.assign(grid.cell_count(), false);
  for (const auto& c : cells) {
    if (!grid.contains(c)) throw Error(errc::kValidation, "target cell outside the grid");
    a.cell_mask_[grid.flat(c)] = true;
  }
  a.cells_ = std::move(cells);
  a.grid_ = grid;
  a.finish();
  return a;
}

void TargetArea::finish() {
  BoundingBox b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  const auto grow = [&b](const GeoPoint& p) {
    b.min_lat = std::min(b.min_lat, p.lat);
    b.min_lng = std::min(b.min_lng, p.lng);
    b.max_lat = std::max(b.max_lat, p.lat);
    b.max_lng = std::max(b.max_lng, p.lng);
  };
  if (is_polygon()) {
    for (const auto& p : ring_) grow(p);
    bbox_ = b;
    // Area centroid in planar lat/lng.
    const std::size_t n = ring_.size();
    double a2 = 0.0, cx = 0.0, cy = 0.0;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const double f = ring_[j].lng * ring_[i].lat - ring_[i].lng * ring_[j].lat;
      a2 += f;
      cx += (ring_[j].lng + ring_[i].lng) * f;
      cy += (ring_[j].lat + ring_[i].lat) * f;
    }
    const GeoPoint centroid{cy / (3.0 * a2), cx / (3.0 * a2)};
    if (contains(centroid)) {
      interior_ = centroid;
      return;
    }
    for (double frac : {0.5, 0.37, 0.63, 0.21, 0.79, 0.11, 0.89, 0.03, 0.97}) {
      const auto p = scan_line(ring_, b.min_lat + frac * (b.max_lat - b.min_lat));
      if (p && contains(*p)) {
        interior_ = *p;
        return;
      }
    }
    throw Error(errc::kValidation, "could not find a point inside the target polygon");
  }
  const GridSpec& g = *grid_;
  double mr = 0.0, mc = 0.0;
  for (const auto& c : cells_) {
    grow(from_grid_coord({static_cast<double>(c.row), static_cast<double>(c.col)}, g));
    grow(from_grid_coord({c.row + 1.0, c.col + 1.0}, g));
    mr += c.row;
    mc += c.col;
  }
  bbox_ = b;
  mr /= static_cast<double>(cells_.size());
  mc /= static_cast<double>(cells_.size());
  const auto nearest = std::min_element(cells_.begin(), cells_.end(), [&](const CellIndex& x, const CellIndex& y) {
    return std::hypot(x.row - mr, x.col - mc) < std::hypot(y.row - mr, y.col - mc);
  });
  interior_ = cell_center(*nearest, g);
}

bool TargetArea::contains(const GeoPoint& p) const {
  if (is_polygon()) return point_in_ring(p, ring_);
  const auto c = cell_of(p, *grid_);
  return c && cell_mask_[grid_->flat(*c)];
}

void to_json(Json& j, const TargetArea& a) {
  if (a.is_polygon()) {
    j = {{"polygon", a.ring()}};
  } else {
    j = {{"cells", a.cell_set()}};
  }
}

TargetArea target_area_from_json(const Json& j, const std::optional<GridSpec>& grid) {
  if (!j.is_object()) throw Error(errc::kValidation, "area must be an object");
  if (j.contains("polygon")) return TargetArea::polygon(j.at("polygon").get<std::vector<GeoPoint>>());
  if (j.contains("cells")) {
    if (!grid) throw Error(errc::kValidation, "a cell-set area needs a grid");
    return TargetArea::cells(j.at("cells").get<std::vector<CellIndex>>(), *grid);
  }
  throw Error(errc::kValidation, "area needs 'polygon' or 'cells'");
}

Responder responder(const GeoPoint& fire, std::span<const Station> stations, const TravelParams& p) {
  if (stations.empty()) throw Error(errc::kInvalidArgument, "no stations to respond");
  Responder best{0, travel_time(stations[0].location, fire, p), 0.0};
  for (std::size_t i = 1; i < stations.size(); ++i) {
    const double t = travel_time(stations[i].location, fire, p);
    if (t < best.minutes || (t == best.minutes && stations[i].id < stations[best.index].id)) {
      best = {i, t, 0.0};
    }
  }
  best.km = travel_distance_km(stations[best.index].location, fire, p);
  return best;
}

void validate(const CriteriaConfig& c) {
  validate(c.travel);
  if (!(c.k_minutes > 0.0) || !std::isfinite(c.k_minutes)) {
    throw Error(errc::kInvalidArgument, "k_minutes must be > 0");
  }
}

CriteriaContext::CriteriaContext(std::span<const GeoPoint> fires, std::vector<Station> existing,
                                 TargetArea area, GridSpec grid, CriteriaConfig cfg)
    : existing_(std::move(existing)), area_(std::move(area)), grid_(grid), cfg_(cfg) {
  validate(cfg_);
  validate(grid_);
  for (const auto& f : fires) {
    if (area_.contains(f)) fires_.push_back(f);
  }
  if (fires_.empty()) throw Error(errc::kValidation, "no fires inside the target area");
  existing_best_min_.assign(fires_.size(), std::numeric_limits<double>::infinity());
  if (cfg_.include_existing) {
    for (std::size_t i = 0; i < fires_.size(); ++i) {
      for (const auto& s : existing_) {
        existing_best_min_[i] = std::min(existing_best_min_[i], travel_time(s.location, fires_[i], cfg_.travel));
      }
    }
  }
  existing_reach_.assign(grid_.cell_count(), false);
  std::vector<GeoPoint> pts;
  for (const auto& s : existing_) pts.push_back(s.location);
  for (std::size_t c : reachable_cells(pts)) existing_reach_[c] = true;
}

std::vector<std::size_t> CriteriaContext::reachable_cells(std::span<const GeoPoint> x) const {
  // Only cells within the straight-line radius can qualify; pad by a cell
  // to absorb projection distortion.
  const double radius_km = cfg_.k_minutes / 60.0 * cfg_.travel.speed_kmh / cfg_.travel.detour_factor;
  const double span_cells = radius_km / grid_.cell_size_km + 2.0;
  std::vector<std::size_t> out;
  for (const auto& p : x) {
    const GridCoord gc = to_grid_coord(p, grid_);
    const int r0 = std::max(0, static_cast<int>(std::floor(gc.row - span_cells)));
    const int r1 = std::min(grid_.rows - 1, static_cast<int>(std::ceil(gc.row + span_cells)));
    const int c0 = std::max(0, static_cast<int>(std::floor(gc.col - span_cells)));
    const int c1 = std::min(grid_.cols - 1, static_cast<int>(std::ceil(gc.col + span_cells)));
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        if (travel_time(p, cell_center(r, c, grid_), cfg_.travel) <= cfg_.k_minutes) {
          out.push_back(grid_.flat({r, c}));
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> CriteriaContext::evaluate(std::span<const GeoPoint> x,
                                              std::span<const Criterion> which) const {
  if (x.empty()) throw Error(errc::kValidation, "candidate layout is empty");
  for (const auto& p : x) {
    if (!area_.contains(p)) throw Error(errc::kValidation, "candidate station outside the target area");
  }
  bool want_travel = false, want_so = false;
  for (Criterion c : which) (c == Criterion::SO ? want_so : want_travel) = true;

  double sum_t = 0.0, max_t = 0.0;
  if (want_travel) {
    for (std::size_t i = 0; i < fires_.size(); ++i) {
      double t = existing_best_min_[i];
      for (const auto& p : x) t = std::min(t, travel_time(p, fires_[i], cfg_.travel));
      sum_t += t;
      max_t = std::max(max_t, t);
    }
  }
  // Detoured distance is time scaled by a constant, so the nearest responder
  // by time is also nearest by distance.
  const double km_per_min = cfg_.travel.speed_kmh / 60.0;
  const double n = static_cast<double>(fires_.size());

  double so = 0.0;
  if (want_so) {
    const auto cells = reachable_cells(x);
    std::size_t shared = 0;
    for (std::size_t c : cells) shared += existing_reach_[c] ? 1 : 0;
    so = cells.empty() ? 0.0 : static_cast<double>(shared) / static_cast<double>(cells.size());
  }

  std::vector<double> out;
  out.reserve(which.size());
  for (Criterion c : which) {
    switch (c) {
      case Criterion::ART: out.push_back(sum_t / n); break;
      case Criterion::MRT: out.push_back(max_t); break;
      case Criterion::ATD: out.push_back(sum_t / n * km_per_min); break;
      case Criterion::MTD: out.push_back(max_t * km_per_min); break;
      case Criterion::SO: out.push_back(so); break;
    }
  }
  return out;
}

std::vector<Station> new_stations(std::span<const GeoPoint> x) {
  std::vector<Station> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.push_back({"N" + std::to_string(i + 1), x[i], {}, std::nullopt});
  }
  return out;
}

std::vector<GeoPoint> incident_points(std::span<const FireRecord> records) {
  std::vector<GeoPoint> out;
  std::unordered_set<std::string> seen;
  for (const auto& r : records) {
    if (seen.insert(r.id).second) out.push_back(r.location);
  }
  return out;
}

}  // namespace stationplan
