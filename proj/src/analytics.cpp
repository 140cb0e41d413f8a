#include "stationplan/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "stationplan/error.hpp"

namespace stationplan {

std::map<int, int> yearly_counts(std::span<const FireRecord> records) {
  std::unordered_map<std::string, Timestamp> first;
  for (const auto& r : records) {
    auto [it, inserted] = first.emplace(r.id, r.alarm_time);
    if (!inserted) it->second = std::min(it->second, r.alarm_time);
  }
  std::map<int, int> out;
  for (const auto& [id, t] : first) ++out[year_of(t)];
  return out;
}

double quantile_inclusive(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(errc::kInvalidArgument, "quantile of an empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

FiveNumber five_number(std::vector<double> values) {
  if (values.empty()) throw Error(errc::kInvalidArgument, "five-number summary of an empty sample");
  std::sort(values.begin(), values.end());
  return {values.front(),
          quantile_inclusive(values, 0.25),
          quantile_inclusive(values, 0.5),
          quantile_inclusive(values, 0.75),
          values.back(),
          values.size()};
}

std::map<int, FiveNumber> response_distribution(std::span<const FireRecord> records) {
  std::map<int, std::vector<double>> by_year;
  for (const auto& r : records) by_year[year_of(r.alarm_time)].push_back(r.response_time_min);
  std::map<int, FiveNumber> out;
  for (auto& [y, v] : by_year) out[y] = five_number(std::move(v));
  return out;
}

int compass_sector(double bearing) noexcept {
  const double b = std::fmod(std::fmod(bearing, 360.0) + 360.0, 360.0);
  return static_cast<int>(std::floor((b + 30.0) / 60.0)) % kCompassSectors;
}

StationProfile station_profile(std::span<const FireRecord> records, std::span<const Station> stations,
                               const std::string& station_id, double k_minutes, int sector_hours) {
  if (sector_hours < 1 || 24 % sector_hours != 0) {
    throw Error(errc::kInvalidArgument, "sector_hours must divide 24");
  }
  const auto st = std::find_if(stations.begin(), stations.end(),
                               [&](const Station& s) { return s.id == station_id; });
  if (st == stations.end()) throw Error(errc::kNotFound, "unknown station '" + station_id + "'");
  StationProfile p;
  p.station_id = station_id;
  p.k_minutes = k_minutes;
  for (int h = 0; h < 24; h += sector_hours) p.time_sectors.push_back({h, h + sector_hours, 0, 0});
  for (const auto& r : records) {
    if (r.responding_station_id != station_id) continue;
    ++p.total;
    ++(r.role == Role::Primary ? p.primary : p.backup);
    ++p.compass[static_cast<std::size_t>(compass_sector(bearing_deg(st->location, r.location)))];
    TimeSector& ts = p.time_sectors[static_cast<std::size_t>(hour_of(r.alarm_time) / sector_hours)];
    ++(r.response_time_min >= k_minutes ? ts.at_or_above_k : ts.below_k);
  }
  return p;
}

std::vector<StationSummary> station_summaries(std::span<const FireRecord> records,
                                              std::span<const Station> stations) {
  std::vector<StationSummary> out;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& s : stations) {
    index[s.id] = out.size();
    out.push_back({s.id, s.location, 0, 0, 0});
  }
  for (const auto& r : records) {
    const auto it = index.find(r.responding_station_id);
    if (it == index.end()) continue;
    StationSummary& s = out[it->second];
    ++s.total;
    ++(r.role == Role::Primary ? s.primary : s.backup);
  }
  return out;
}

std::vector<SdPoint> sd_series(const AttributionFrame& frame, const SpatioTemporalTensor& actuals) {
  if (!(actuals.grid() == frame.grid())) {
    throw Error(errc::kShapeMismatch, "actuals grid differs from the attribution grid");
  }
  std::vector<SdPoint> out;
  for (std::size_t t = 0; t < frame.time_count(); ++t) {
    const YearMonth m = frame.timestamps()[t];
    const auto ti = actuals.time_index(m);
    if (!ti) throw Error(errc::kShapeMismatch, "actuals lack month " + m.to_string());
    SdPoint p;
    p.month = m;
    for (double v : actuals.plane(*ti, 0)) p.actual += v;
    p.predicted = frame.city_predicted(t);
    p.baseline = frame.city_baseline(t);
    for (std::size_t f = 0; f < frame.features().size(); ++f) p.phi.push_back(frame.city_phi(t, f));
    out.push_back(std::move(p));
  }
  return out;
}

Json yearly_counts_json(const std::map<int, int>& counts) {
  Json rows = Json::array();
  for (const auto& [y, n] : counts) rows.push_back({{"year", y}, {"count", n}});
  return {{"years", std::move(rows)}};
}

Json to_json(const std::map<int, FiveNumber>& dist) {
  Json rows = Json::array();
  for (const auto& [y, f] : dist) {
    rows.push_back({{"year", y},
                    {"min", f.min},
                    {"q1", f.q1},
                    {"median", f.median},
                    {"q3", f.q3},
                    {"max", f.max},
                    {"count", f.count}});
  }
  return {{"years", std::move(rows)}};
}

Json to_json(const StationProfile& p) {
  Json sectors = Json::array();
  for (const auto& s : p.time_sectors) {
    sectors.push_back({{"start_hour", s.start_hour},
                       {"end_hour", s.end_hour},
                       {"below_k", s.below_k},
                       {"at_or_above_k", s.at_or_above_k}});
  }
  return {{"station_id", p.station_id},
          {"k_minutes", p.k_minutes},
          {"total", p.total},
          {"roles", {{"primary", p.primary}, {"backup", p.backup}}},
          {"compass", p.compass},
          {"time_sectors", std::move(sectors)}};
}

Json to_json(std::span<const StationSummary> rows) {
  Json out = Json::array();
  for (const auto& s : rows) {
    out.push_back({{"id", s.id},
                   {"geo", s.location},
                   {"total", s.total},
                   {"roles", {{"primary", s.primary}, {"backup", s.backup}}}});
  }
  return {{"stations", std::move(out)}};
}

Json sd_series_json(std::span<const SdPoint> series, std::span<const std::string> features) {
  Json rows = Json::array();
  for (const auto& p : series) {
    Json phi = Json::object();
    for (std::size_t f = 0; f < features.size(); ++f) phi[features[f]] = p.phi.at(f);
    rows.push_back({{"month", p.month},
                    {"actual", p.actual},
                    {"predicted", p.predicted},
                    {"baseline", p.baseline},
                    {"phi", std::move(phi)}});
  }
  return {{"features", features}, {"series", std::move(rows)}};
}

}  // namespace stationplan
