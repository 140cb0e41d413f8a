#include "stationplan/simulate.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "stationplan/criteria.hpp"
#include "stationplan/error.hpp"

namespace stationplan {

std::string_view to_string(Bucketing b) noexcept {
  switch (b) {
    case Bucketing::Month: return "month";
    case Bucketing::Quarter: return "quarter";
    case Bucketing::Year: return "year";
  }
  return "?";
}

Bucketing parse_bucketing(std::string_view s) {
  for (Bucketing b : {Bucketing::Month, Bucketing::Quarter, Bucketing::Year}) {
    if (to_string(b) == s) return b;
  }
  throw Error(errc::kInvalidArgument, "unknown bucketing '" + std::string(s) + "'");
}

int period_of(Timestamp t, Bucketing b) {
  const YearMonth ym = YearMonth::of(t);
  switch (b) {
    case Bucketing::Month: return ym.ordinal();
    case Bucketing::Quarter: return ym.year() * 4 + (ym.month() - 1) / 3;
    case Bucketing::Year: return ym.year();
  }
  return 0;
}

std::string period_label(int period, Bucketing b) {
  switch (b) {
    case Bucketing::Month: return YearMonth::from_ordinal(period).to_string();
    case Bucketing::Quarter: {
      const int year = period >= 0 ? period / 4 : -((-period + 3) / 4);
      return std::to_string(year) + "-Q" + std::to_string(period - year * 4 + 1);
    }
    case Bucketing::Year: return std::to_string(period);
  }
  return {};
}

TransferSimReport simulate_transfers(std::span<const FireRecord> fires, std::span<const Station> existing,
                                     std::span<const GeoPoint> solution, const SimConfig& cfg) {
  if (solution.empty()) throw Error(errc::kInvalidArgument, "solution has no new stations");
  validate(cfg.travel);
  TransferSimReport rep;
  rep.bucketing = cfg.bucketing;
  rep.existing.assign(existing.begin(), existing.end());
  rep.added = new_stations(solution);
  if (fires.empty()) return rep;

  std::set<std::string> known;
  for (const auto& s : existing) known.insert(s.id);
  std::set<std::string> unknown;

  int first = period_of(fires[0].alarm_time, cfg.bucketing), last = first;
  for (const auto& f : fires) {
    const int p = period_of(f.alarm_time, cfg.bucketing);
    first = std::min(first, p);
    last = std::max(last, p);
    if (!known.contains(f.responding_station_id)) unknown.insert(f.responding_station_id);
  }
  rep.unknown_station_ids.assign(unknown.begin(), unknown.end());

  for (int p = first; p <= last; ++p) {
    PeriodFlows pf;
    pf.period = p;
    pf.label = period_label(p, cfg.bucketing);
    for (const auto& s : existing) pf.existing[s.id] = {};
    if (!unknown.empty()) pf.existing[std::string(kUnknownStationRow)] = {};
    for (const auto& s : rep.added) pf.assigned[s.id] = 0;
    rep.periods.push_back(std::move(pf));
  }

  std::vector<std::map<std::pair<std::string, std::string>, int>> edges(rep.periods.size());
  for (const auto& f : fires) {
    const auto slot = static_cast<std::size_t>(period_of(f.alarm_time, cfg.bucketing) - first);
    PeriodFlows& pf = rep.periods[slot];
    const std::string row =
        known.contains(f.responding_station_id) ? f.responding_station_id : std::string(kUnknownStationRow);
    StationRow& sr = pf.existing[row];
    ++sr.before;
    const bool eligible = f.role == Role::Primary || cfg.transfer_backup;
    std::size_t best = 0;
    double best_t = travel_time(solution[0], f.location, cfg.travel);
    for (std::size_t i = 1; i < solution.size(); ++i) {
      const double t = travel_time(solution[i], f.location, cfg.travel);
      if (t < best_t) {
        best_t = t;
        best = i;
      }
    }
    if (eligible && best_t < f.response_time_min) {
      const std::string& to = rep.added[best].id;
      ++pf.assigned[to];
      ++edges[slot][{row, to}];
      ++pf.total_transferred;
      ++rep.total_transferred;
    } else {
      ++sr.after;
    }
  }
  for (std::size_t i = 0; i < rep.periods.size(); ++i) {
    for (const auto& [key, w] : edges[i]) rep.periods[i].edges.push_back({key.first, key.second, w});
  }
  return rep;
}

Comparison compare(std::span<const std::pair<std::string, TransferSimReport>> reports) {
  Comparison c;
  if (reports.empty()) return c;
  c.bucketing = reports[0].second.bucketing;
  std::vector<std::size_t> order(reports.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
    if (reports[i].second.bucketing != c.bucketing) {
      throw Error(errc::kValidation, "reports use different bucketing");
    }
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return reports[a].first < reports[b].first; });
  std::set<int> periods;
  for (const auto& [id, r] : reports) {
    for (const auto& p : r.periods) periods.insert(p.period);
  }
  const std::vector<int> plist(periods.begin(), periods.end());
  for (int p : plist) c.periods.push_back(period_label(p, c.bucketing));
  c.totals.assign(plist.size(), std::vector<int>(reports.size(), 0));
  for (std::size_t s = 0; s < order.size(); ++s) {
    const auto& [id, r] = reports[order[s]];
    c.solution_ids.push_back(id);
    for (const auto& p : r.periods) {
      const auto slot = static_cast<std::size_t>(std::lower_bound(plist.begin(), plist.end(), p.period) - plist.begin());
      c.totals[slot][s] = p.total_transferred;
    }
    std::vector<int> cum;
    int run = 0;
    for (std::size_t p = 0; p < plist.size(); ++p) cum.push_back(run += c.totals[p][s]);
    c.cumulative.push_back(std::move(cum));
  }
  return c;
}

Json to_json(const TransferSimReport& r) {
  std::unordered_map<std::string, const Station*> geo;
  for (const auto& s : r.existing) geo[s.id] = &s;
  Json periods = Json::array();
  for (const auto& p : r.periods) {
    Json nodes = Json::array();
    for (const auto& [id, row] : p.existing) {
      const auto it = geo.find(id);
      nodes.push_back({{"id", id},
                       {"kind", "existing"},
                       {"geo", it != geo.end() ? Json(it->second->location) : Json(nullptr)},
                       {"before", row.before},
                       {"after", row.after},
                       {"assigned", nullptr}});
    }
    for (const auto& s : r.added) {
      nodes.push_back({{"id", s.id},
                       {"kind", "new"},
                       {"geo", s.location},
                       {"before", nullptr},
                       {"after", nullptr},
                       {"assigned", p.assigned.at(s.id)}});
    }
    Json edges = Json::array();
    for (const auto& e : p.edges) edges.push_back({{"from", e.from}, {"to", e.to}, {"weight", e.weight}});
    periods.push_back({{"period", p.label},
                       {"total_transferred", p.total_transferred},
                       {"nodes", std::move(nodes)},
                       {"edges", std::move(edges)}});
  }
  Json added = Json::array();
  for (const auto& s : r.added) added.push_back({{"id", s.id}, {"geo", s.location}});
  return {{"bucketing", to_string(r.bucketing)},
          {"new_stations", std::move(added)},
          {"total_transferred", r.total_transferred},
          {"unknown_station_ids", r.unknown_station_ids},
          {"periods", std::move(periods)}};
}

Json to_json(const Comparison& c) {
  return {{"bucketing", to_string(c.bucketing)},
          {"solutions", c.solution_ids},
          {"periods", c.periods},
          {"totals", c.totals},
          {"cumulative", c.cumulative}};
}

}  // namespace stationplan
