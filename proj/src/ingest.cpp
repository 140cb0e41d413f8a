#include "stationplan/ingest.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include "stationplan/error.hpp"
#include "stationplan/json_io.hpp"

namespace stationplan {

namespace {

// RFC 4180 fields on a single line: quoted fields may hold commas and doubled
// quotes, not newlines.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

class CsvTable {
 public:
  CsvTable(std::istream& in, std::span<const std::string_view> required) : in_(in) {
    std::string header;
    if (!std::getline(in_, header)) throw Error(errc::kParse, "empty input: header row missing");
    ++line_;
    if (header.size() >= 3 && header.compare(0, 3, "\xEF\xBB\xBF") == 0) header.erase(0, 3);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    const auto names = split_csv_line(header);
    for (std::size_t i = 0; i < names.size(); ++i) columns_.emplace(trim(names[i]), i);
    for (auto name : required) {
      if (!columns_.contains(std::string(name))) {
        throw Error(errc::kParse, "missing required column '" + std::string(name) + "'");
      }
    }
    width_ = names.size();
  }

  bool has(std::string_view name) const { return columns_.contains(std::string(name)); }

  /// Next non-blank row; false at end of input.
  bool next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (trim(line).empty()) continue;
      row_ = split_csv_line(line);
      return true;
    }
    return false;
  }

  std::size_t line() const { return line_; }
  bool width_ok() const { return row_.size() == width_; }

  std::string field(std::string_view name) const {
    const auto it = columns_.find(std::string(name));
    if (it == columns_.end() || it->second >= row_.size()) return {};
    return trim(row_[it->second]);
  }

 private:
  std::istream& in_;
  std::unordered_map<std::string, std::size_t> columns_;
  std::vector<std::string> row_;
  std::size_t width_ = 0;
  std::size_t line_ = 0;
};

std::optional<double> to_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<int> to_int(const std::string& s) {
  if (s.empty()) return std::nullopt;
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Parses lat/lng columns; returns the reject reason or empty on success.
std::string read_location(const CsvTable& t, GeoPoint& out) {
  const auto lat = to_double(t.field("lat"));
  const auto lng = to_double(t.field("lng"));
  if (!lat || !lng) return "malformed coordinate";
  out = {*lat, *lng};
  if (!is_valid(out)) return "coordinate out of range";
  return {};
}

constexpr std::string_view kFireColumns[] = {"id",  "lat",     "lng",  "alarm_time", "response_time_min",
                                             "station_id", "role"};
constexpr std::string_view kStationColumns[] = {"id", "lat", "lng", "commissioned"};
constexpr std::string_view kFeatureColumns[] = {"feature", "granularity", "cell_i",
                                                "cell_j",  "month",       "value"};

std::optional<Granularity> parse_granularity(std::string_view s) {
  if (s == "per_cell_per_month") return Granularity::PerCellPerMonth;
  if (s == "per_month_global") return Granularity::PerMonthGlobal;
  if (s == "per_cell_static") return Granularity::PerCellStatic;
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Granularity g) noexcept {
  switch (g) {
    case Granularity::PerCellPerMonth: return "per_cell_per_month";
    case Granularity::PerMonthGlobal: return "per_month_global";
    case Granularity::PerCellStatic: return "per_cell_static";
  }
  return "per_cell_per_month";
}

ParseResult<FireRecord> parse_fire_records(std::istream& in) {
  CsvTable table(in, kFireColumns);
  ParseResult<FireRecord> result;
  while (table.next()) {
    const auto reject = [&](std::string reason) {
      result.rejects.push_back({table.line(), std::move(reason)});
    };
    if (!table.width_ok()) {
      reject("wrong number of fields");
      continue;
    }
    FireRecord r;
    r.id = table.field("id");
    if (r.id.empty()) {
      reject("missing id");
      continue;
    }
    if (auto why = read_location(table, r.location); !why.empty()) {
      reject(std::move(why));
      continue;
    }
    const auto alarm = parse_timestamp(table.field("alarm_time"));
    if (!alarm) {
      reject("malformed alarm_time");
      continue;
    }
    r.alarm_time = *alarm;
    const auto response = to_double(table.field("response_time_min"));
    if (!response) {
      reject("malformed response time");
      continue;
    }
    if (*response < 0.0) {
      reject("negative response time");
      continue;
    }
    r.response_time_min = *response;
    r.responding_station_id = table.field("station_id");
    if (r.responding_station_id.empty()) {
      reject("missing station_id");
      continue;
    }
    const auto role = parse_role(table.field("role"));
    if (!role) {
      reject("unknown role");
      continue;
    }
    r.role = *role;
    result.items.push_back(std::move(r));
  }
  return result;
}

ParseResult<Station> parse_stations(std::istream& in) {
  CsvTable table(in, kStationColumns);
  const bool has_staffing = table.has("staffing");
  ParseResult<Station> result;
  std::set<std::string> seen;
  while (table.next()) {
    const auto reject = [&](std::string reason) {
      result.rejects.push_back({table.line(), std::move(reason)});
    };
    if (!table.width_ok()) {
      reject("wrong number of fields");
      continue;
    }
    Station s;
    s.id = table.field("id");
    if (s.id.empty()) {
      reject("missing id");
      continue;
    }
    if (!seen.insert(s.id).second) {
      throw Error(errc::kParse, "duplicate station id '" + s.id + "' on line " +
                                    std::to_string(table.line()));
    }
    if (auto why = read_location(table, s.location); !why.empty()) {
      reject(std::move(why));
      continue;
    }
    const auto commissioned = parse_date(table.field("commissioned"));
    if (!commissioned) {
      reject("malformed commissioned date");
      continue;
    }
    s.commissioned = *commissioned;
    if (has_staffing) {
      const std::string raw = table.field("staffing");
      if (!raw.empty()) {
        const auto staffing = to_int(raw);
        if (!staffing || *staffing < 0) {
          reject("malformed staffing");
          continue;
        }
        s.staffing = *staffing;
      }
    }
    result.items.push_back(std::move(s));
  }
  return result;
}

std::optional<double> FeatureTable::lookup(CellIndex cell, YearMonth month) const {
  Key key;
  switch (granularity) {
    case Granularity::PerCellPerMonth: key = {cell.row, cell.col, month.ordinal()}; break;
    case Granularity::PerMonthGlobal: key = {-1, -1, month.ordinal()}; break;
    case Granularity::PerCellStatic: key = {cell.row, cell.col, kNoMonth}; break;
  }
  const auto it = values.find(key);
  if (it == values.end()) return std::nullopt;
  return it->second;
}

ParseResult<FeatureTable> parse_feature_tables(std::istream& in) {
  CsvTable table(in, kFeatureColumns);
  ParseResult<FeatureTable> result;
  std::unordered_map<std::string, std::size_t> index;
  while (table.next()) {
    const auto reject = [&](std::string reason) {
      result.rejects.push_back({table.line(), std::move(reason)});
    };
    if (!table.width_ok()) {
      reject("wrong number of fields");
      continue;
    }
    const std::string name = table.field("feature");
    if (name.empty()) {
      reject("missing feature name");
      continue;
    }
    const auto granularity = parse_granularity(table.field("granularity"));
    if (!granularity) {
      reject("unknown granularity");
      continue;
    }
    const auto value = to_double(table.field("value"));
    if (!value) {
      reject("non-finite or malformed value");
      continue;
    }
    FeatureTable::Key key{-1, -1, FeatureTable::kNoMonth};
    const bool needs_cell = *granularity != Granularity::PerMonthGlobal;
    const bool needs_month = *granularity != Granularity::PerCellStatic;
    if (needs_cell) {
      const auto i = to_int(table.field("cell_i"));
      const auto j = to_int(table.field("cell_j"));
      if (!i || !j) {
        reject("malformed cell index");
        continue;
      }
      std::get<0>(key) = *i;
      std::get<1>(key) = *j;
    }
    if (needs_month) {
      const auto month = YearMonth::parse(table.field("month"));
      if (!month) {
        reject("malformed month");
        continue;
      }
      std::get<2>(key) = month->ordinal();
    }
    auto [it, inserted] = index.emplace(name, result.items.size());
    if (inserted) result.items.push_back({name, *granularity, {}});
    FeatureTable& ft = result.items[it->second];
    if (ft.granularity != *granularity) {
      throw Error(errc::kParse, "feature '" + name + "' listed with two granularities");
    }
    if (!ft.values.emplace(key, *value).second) {
      reject("duplicate key");
      continue;
    }
  }
  return result;
}

RasterResult rasterize(std::span<const FireRecord> records, std::span<const FeatureTable> features,
                       const GridSpec& grid, MonthWindow window, int interval_months) {
  validate(grid);
  if (window.end < window.start) throw Error(errc::kInvalidArgument, "empty month window");
  if (interval_months < 1) throw Error(errc::kInvalidArgument, "interval_months must be >= 1");

  std::vector<YearMonth> stamps;
  for (YearMonth m = window.start; m <= window.end; m = m + interval_months) stamps.push_back(m);
  std::vector<std::string> channels{std::string(kFireCountChannel)};
  for (const auto& f : features) channels.push_back(f.feature);
  RasterResult result{SpatioTemporalTensor(grid, stamps, channels)};
  SpatioTemporalTensor& tensor = result.tensor;
  const YearMonth last_covered = stamps.back() + (interval_months - 1);

  // One representative record per incident id, chosen independent of input order.
  std::unordered_map<std::string, const FireRecord*> incidents;
  for (const auto& r : records) {
    auto [it, inserted] = incidents.emplace(r.id, &r);
    if (!inserted) {
      const FireRecord& cur = *it->second;
      if (std::tie(r.alarm_time, r.location.lat, r.location.lng) <
          std::tie(cur.alarm_time, cur.location.lat, cur.location.lng)) {
        it->second = &r;
      }
    }
  }
  for (const auto& [id, rec] : incidents) {
    const YearMonth m = YearMonth::of(rec->alarm_time);
    if (m < window.start || m > last_covered) {
      ++result.skipped_out_of_window;
      continue;
    }
    const auto cell = cell_of(rec->location, grid);
    if (!cell) {
      ++result.skipped_out_of_extent;
      continue;
    }
    const auto t = static_cast<std::size_t>((m - window.start) / interval_months);
    tensor.at(t, 0, grid.flat(*cell)) += 1.0;
    ++result.incidents;
  }

  for (std::size_t f = 0; f < features.size(); ++f) {
    const FeatureTable& table = features[f];
    for (const auto& [key, value] : table.values) {
      const auto [row, col, month] = key;
      if (table.granularity != Granularity::PerMonthGlobal && !grid.contains({row, col})) {
        throw Error(errc::kOutOfBounds, "feature '" + table.feature + "' references unknown cell (" +
                                            std::to_string(row) + ", " + std::to_string(col) + ")");
      }
    }
    for (std::size_t t = 0; t < stamps.size(); ++t) {
      for (std::size_t k = 0; k < grid.cell_count(); ++k) {
        const CellIndex cell = grid.unflat(k);
        double sum = 0.0;
        int found = 0;
        for (int dm = 0; dm < interval_months; ++dm) {
          if (const auto v = table.lookup(cell, stamps[t] + dm)) {
            sum += *v;
            ++found;
          }
        }
        if (found == 0) {
          throw Error(errc::kValidation, "feature '" + table.feature + "' has no value for cell (" +
                                             std::to_string(cell.row) + ", " +
                                             std::to_string(cell.col) + ") in " +
                                             stamps[t].to_string());
        }
        tensor.at(t, f + 1, k) = sum / found;
      }
    }
  }
  return result;
}

std::vector<std::string> unknown_station_refs(std::span<const FireRecord> records,
                                              std::span<const Station> stations) {
  std::set<std::string> known;
  for (const auto& s : stations) known.insert(s.id);
  std::set<std::string> unknown;
  for (const auto& r : records) {
    if (!known.contains(r.responding_station_id)) unknown.insert(r.responding_station_id);
  }
  return {unknown.begin(), unknown.end()};
}

void write_fire_records(std::ostream& out, std::span<const FireRecord> records) {
  out << "id,lat,lng,alarm_time,response_time_min,station_id,role\n";
  for (const auto& r : records) {
    out << csv_escape(r.id) << ',' << format_double(r.location.lat) << ','
        << format_double(r.location.lng) << ',' << format_timestamp(r.alarm_time) << ','
        << format_double(r.response_time_min) << ',' << csv_escape(r.responding_station_id) << ','
        << to_string(r.role) << '\n';
  }
}

void write_stations(std::ostream& out, std::span<const Station> stations) {
  out << "id,lat,lng,commissioned,staffing\n";
  for (const auto& s : stations) {
    out << csv_escape(s.id) << ',' << format_double(s.location.lat) << ','
        << format_double(s.location.lng) << ',' << format_date(s.commissioned) << ',';
    if (s.staffing) out << *s.staffing;
    out << '\n';
  }
}

void write_feature_tables(std::ostream& out, std::span<const FeatureTable> tables) {
  out << "feature,granularity,cell_i,cell_j,month,value\n";
  for (const auto& t : tables) {
    for (const auto& [key, value] : t.values) {
      const auto [row, col, month] = key;
      out << csv_escape(t.feature) << ',' << to_string(t.granularity) << ',';
      if (t.granularity != Granularity::PerMonthGlobal) out << row << ',' << col;
      else out << ',';
      out << ',';
      if (t.granularity != Granularity::PerCellStatic) out << YearMonth::from_ordinal(month).to_string();
      out << ',' << format_double(value) << '\n';
    }
  }
}

namespace {

constexpr std::string_view kTensorFormat = "stationplan-tensor";

void put_f64le(std::ostream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (char& b : bytes) {
    b = static_cast<char>(bits & 0xFFu);
    bits >>= 8;
  }
  out.write(bytes, 8);
}

double get_f64le(const unsigned char* bytes) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | bytes[i];
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_tensor(std::ostream& out, const SpatioTemporalTensor& tensor) {
  Json header{{"format", kTensorFormat},
              {"version", 1},
              {"grid", tensor.grid()},
              {"channels", tensor.channels()},
              {"timestamps", tensor.timestamps()},
              {"encoding", "f64le"},
              {"shape", {tensor.time_count(), tensor.channel_count(), tensor.grid().rows,
                         tensor.grid().cols}}};
  out << header.dump() << '\n';
  for (double v : tensor.values()) put_f64le(out, v);
  if (!out) throw Error(errc::kIo, "failed writing tensor");
}

SpatioTemporalTensor read_tensor(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(errc::kParse, "tensor file: missing header");
  Json header;
  try {
    header = Json::parse(line);
  } catch (const Json::exception& e) {
    throw Error(errc::kParse, std::string("tensor file: bad header: ") + e.what());
  }
  if (header.value("format", "") != kTensorFormat || header.value("encoding", "") != "f64le") {
    throw Error(errc::kParse, "tensor file: unsupported format");
  }
  SpatioTemporalTensor tensor(header.at("grid").get<GridSpec>(),
                              header.at("timestamps").get<std::vector<YearMonth>>(),
                              header.at("channels").get<std::vector<std::string>>());
  auto values = tensor.mutable_values();
  std::vector<unsigned char> bytes(values.size() * 8);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != bytes.size()) {
    throw Error(errc::kParse, "tensor file: value block truncated");
  }
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = get_f64le(bytes.data() + 8 * i);
  return tensor;
}

}  // namespace stationplan
