#include "stationplan/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <unordered_map>

#include "stationplan/error.hpp"

namespace stationplan {

void validate(const TravelParams& p) {
  if (!(p.speed_kmh > 0.0) || !std::isfinite(p.speed_kmh)) {
    throw Error(errc::kInvalidArgument, "speed_kmh must be > 0");
  }
  if (!(p.detour_factor >= 1.0) || !std::isfinite(p.detour_factor)) {
    throw Error(errc::kInvalidArgument, "detour_factor must be >= 1");
  }
}

double travel_distance_km(const GeoPoint& a, const GeoPoint& b, const TravelParams& p) noexcept {
  return haversine_km(a, b) * p.detour_factor;
}

double travel_time(const GeoPoint& a, const GeoPoint& b, const TravelParams& p) noexcept {
  return travel_distance_km(a, b, p) / p.speed_kmh * 60.0;
}

ReachabilityField::ReachabilityField(GridSpec grid, std::vector<double> minutes)
    : grid_(grid), minutes_(std::move(minutes)) {
  if (minutes_.size() != grid_.cell_count()) {
    throw Error(errc::kShapeMismatch, "reachability values do not match the grid");
  }
}

std::vector<bool> ReachabilityField::reachable(double k) const {
  std::vector<bool> mask(minutes_.size());
  for (std::size_t i = 0; i < minutes_.size(); ++i) mask[i] = minutes_[i] <= k;
  return mask;
}

ReachabilityField reachability_field(std::span<const GeoPoint> stations, const GridSpec& grid,
                                     const TravelParams& p) {
  validate(grid);
  validate(p);
  if (stations.empty()) throw Error(errc::kInvalidArgument, "reachability needs at least one station");
  std::vector<double> minutes(grid.cell_count(), std::numeric_limits<double>::infinity());
  for (std::size_t cell = 0; cell < minutes.size(); ++cell) {
    const GeoPoint center = cell_center(grid.unflat(cell), grid);
    for (const auto& s : stations) minutes[cell] = std::min(minutes[cell], travel_time(s, center, p));
  }
  return {grid, std::move(minutes)};
}

ReachabilityField reachability_field(std::span<const Station> stations, const GridSpec& grid,
                                     const TravelParams& p) {
  std::vector<GeoPoint> points;
  points.reserve(stations.size());
  for (const auto& s : stations) points.push_back(s.location);
  return reachability_field(points, grid, p);
}

namespace {

// Contour vertices live on square-edge midpoints; doubling the padded sample
// coordinates makes them integral.
struct Vertex {
  std::int64_t x = 0;  // doubled column
  std::int64_t y = 0;  // doubled row
  auto operator<=>(const Vertex&) const = default;
};

bool vertex_in_ring(const Vertex& p, const std::vector<Vertex>& ring) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vertex& a = ring[i];
    const Vertex& b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      // p.x < a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y), in integers
      const std::int64_t dy = b.y - a.y;
      const std::int64_t lhs = (p.x - a.x) * dy;
      const std::int64_t rhs = (p.y - a.y) * (b.x - a.x);
      if (dy > 0 ? lhs < rhs : lhs > rhs) inside = !inside;
    }
  }
  return inside;
}

std::int64_t twice_area(const std::vector<Vertex>& ring) {
  std::int64_t s = 0;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    s += ring[j].x * ring[i].y - ring[i].x * ring[j].y;
  }
  return s;
}

std::vector<Vertex> drop_collinear(const std::vector<Vertex>& ring) {
  std::vector<Vertex> out;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vertex& prev = ring[(i + n - 1) % n];
    const Vertex& cur = ring[i];
    const Vertex& next = ring[(i + 1) % n];
    const std::int64_t cross = (cur.x - prev.x) * (next.y - cur.y) - (cur.y - prev.y) * (next.x - cur.x);
    if (cross != 0) out.push_back(cur);
  }
  return out;
}

}  // namespace

bool ReachableRegion::contains(const GeoPoint& p) const {
  if (covers_extent) return true;
  bool inside = false;
  for (const auto& r : rings) {
    if (point_in_ring(p, r.points)) inside = !inside;
  }
  return inside;
}

ReachableRegion boundary(const ReachabilityField& field, double k) {
  if (!(k > 0.0)) throw Error(errc::kInvalidArgument, "k must be > 0");
  const GridSpec& g = field.grid();
  const auto mask = field.reachable(k);
  ReachableRegion region;
  region.k_minutes = k;
  if (std::all_of(mask.begin(), mask.end(), [](bool b) { return b; })) {
    region.covers_extent = true;
    return region;
  }
  if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; })) return region;

  // Padded samples: (rows + 2) x (cols + 2), border unreachable.
  const int prow = g.rows + 2;
  const int pcol = g.cols + 2;
  const auto sample = [&](int r, int c) {
    if (r < 1 || c < 1 || r > g.rows || c > g.cols) return false;
    return static_cast<bool>(mask[g.flat({r - 1, c - 1})]);
  };

  std::map<Vertex, Vertex> next;
  for (int sr = 0; sr + 1 < prow; ++sr) {
    for (int sc = 0; sc + 1 < pcol; ++sc) {
      const int bl = sample(sr, sc), br = sample(sr, sc + 1);
      const int tr = sample(sr + 1, sc + 1), tl = sample(sr + 1, sc);
      const int code = bl | (br << 1) | (tr << 2) | (tl << 3);
      const std::int64_t x = 2 * sc, y = 2 * sr;
      const Vertex B{x + 1, y}, R{x + 2, y + 1}, T{x + 1, y + 2}, L{x, y + 1};
      const auto seg = [&](Vertex from, Vertex to) { next.emplace(from, to); };
      switch (code) {
        case 1: seg(B, L); break;
        case 2: seg(R, B); break;
        case 3: seg(R, L); break;
        case 4: seg(T, R); break;
        case 5: seg(B, R); seg(T, L); break;  // saddle, reachable corners joined
        case 6: seg(T, B); break;
        case 7: seg(T, L); break;
        case 8: seg(L, T); break;
        case 9: seg(B, T); break;
        case 10: seg(L, B); seg(R, T); break;  // saddle, reachable corners joined
        case 11: seg(R, T); break;
        case 12: seg(L, R); break;
        case 13: seg(B, R); break;
        case 14: seg(L, B); break;
        default: break;
      }
    }
  }

  std::vector<std::vector<Vertex>> rings;
  std::map<Vertex, bool> used;
  for (const auto& [start, unused] : next) {
    if (used[start]) continue;
    std::vector<Vertex> ring;
    Vertex v = start;
    do {
      used[v] = true;
      ring.push_back(v);
      v = next.at(v);
    } while (!(v == start));
    rings.push_back(drop_collinear(ring));
  }

  const std::size_t n = rings.size();
  std::vector<int> depth(n, 0);
  std::vector<int> parent(n, -1);
  std::vector<std::int64_t> area(n);
  for (std::size_t i = 0; i < n; ++i) area[i] = std::abs(twice_area(rings[i]));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !vertex_in_ring(rings[i].front(), rings[j])) continue;
      ++depth[i];
      if (parent[i] < 0 || area[j] < area[static_cast<std::size_t>(parent[i])]) parent[i] = static_cast<int>(j);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    ReachableRegion::Ring out;
    out.depth = depth[i];
    out.parent = parent[i];
    for (const Vertex& v : rings[i]) {
      const GridCoord gc{static_cast<double>(v.y) / 2.0 - 0.5, static_cast<double>(v.x) / 2.0 - 0.5};
      out.points.push_back(from_grid_coord(gc, g));
    }
    out.points.push_back(out.points.front());
    region.rings.push_back(std::move(out));
  }
  return region;
}

Json to_geojson(const ReachableRegion& region) {
  const auto ring_coords = [](const ReachableRegion::Ring& r) {
    Json coords = Json::array();
    for (const auto& p : r.points) coords.push_back({p.lng, p.lat});
    return coords;
  };
  Json polygons = Json::array();
  for (std::size_t i = 0; i < region.rings.size(); ++i) {
    const auto& r = region.rings[i];
    if (r.depth % 2 != 0) continue;
    Json poly = Json::array({ring_coords(r)});
    for (const auto& hole : region.rings) {
      if (hole.depth == r.depth + 1 && hole.parent == static_cast<int>(i)) poly.push_back(ring_coords(hole));
    }
    polygons.push_back(std::move(poly));
  }
  return {{"type", "Feature"},
          {"properties", {{"k_minutes", region.k_minutes}, {"covers_extent", region.covers_extent}}},
          {"geometry", {{"type", "MultiPolygon"}, {"coordinates", std::move(polygons)}}}};
}

CellDemand cell_demand(std::span<const FireRecord> records, const GridSpec& grid) {
  validate(grid);
  CellDemand d{grid, std::vector<double>(grid.cell_count(), 0.0),
               std::vector<double>(grid.cell_count(), 0.0)};
  // Response of an incident = its fastest recorded arrival.
  std::unordered_map<std::string, std::pair<GeoPoint, double>> incidents;
  for (const auto& r : records) {
    auto [it, inserted] = incidents.emplace(r.id, std::make_pair(r.location, r.response_time_min));
    if (!inserted) it->second.second = std::min(it->second.second, r.response_time_min);
  }
  for (const auto& [id, inc] : incidents) {
    const auto cell = cell_of(inc.first, grid);
    if (!cell) continue;
    const std::size_t k = grid.flat(*cell);
    d.fire_count[k] += 1.0;
    d.avg_response_min[k] += inc.second;
  }
  for (std::size_t k = 0; k < d.fire_count.size(); ++k) {
    if (d.fire_count[k] > 0.0) d.avg_response_min[k] /= d.fire_count[k];
  }
  return d;
}

std::vector<UnderservedCell> underserved(const ReachabilityField& field,
                                         std::span<const double> fire_counts,
                                         std::span<const double> avg_response, double k) {
  const std::size_t cells = field.grid().cell_count();
  if (fire_counts.size() != cells || avg_response.size() != cells) {
    throw Error(errc::kShapeMismatch, "demand arrays do not match the reachability grid");
  }
  std::vector<UnderservedCell> out;
  for (std::size_t c = 0; c < cells; ++c) {
    if (field.at(c) > k) {
      out.push_back({field.grid().unflat(c), fire_counts[c], avg_response[c], field.at(c), 0.0});
    }
  }
  if (out.empty()) return out;
  const auto normalizer = [&](auto member) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& u : out) {
      lo = std::min(lo, u.*member);
      hi = std::max(hi, u.*member);
    }
    return [lo, hi](double v) { return hi > lo ? (v - lo) / (hi - lo) : 1.0; };
  };
  const auto norm_count = normalizer(&UnderservedCell::fire_count);
  const auto norm_resp = normalizer(&UnderservedCell::avg_response_min);
  for (auto& u : out) u.score = 0.5 * norm_count(u.fire_count) + 0.5 * norm_resp(u.avg_response_min);
  std::stable_sort(out.begin(), out.end(), [](const UnderservedCell& a, const UnderservedCell& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.cell < b.cell;
  });
  return out;
}

Json to_json(const ReachabilityField& field) {
  return {{"grid", field.grid()},
          {"layout", "row-major, row 0 = south"},
          {"min_time_min", field.minutes()}};
}

Json to_json(std::span<const UnderservedCell> report) {
  Json out = Json::array();
  for (const auto& u : report) {
    out.push_back({{"cell", u.cell},
                   {"fire_count", u.fire_count},
                   {"avg_response_min", u.avg_response_min},
                   {"min_time_min", u.min_time_min},
                   {"score", u.score}});
  }
  return out;
}

}  // namespace stationplan
