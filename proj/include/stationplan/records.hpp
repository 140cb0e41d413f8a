#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

#include "stationplan/geo.hpp"
#include "stationplan/time.hpp"

namespace stationplan {

enum class Role { Primary, Backup };

std::string_view to_string(Role r) noexcept;
std::optional<Role> parse_role(std::string_view text) noexcept;

/// One responding-station action at an incident.  An incident attended by
/// several stations appears as several records sharing `id`.
struct FireRecord {
  std::string id;
  GeoPoint location;
  Timestamp alarm_time;
  double response_time_min = 0.0;
  std::string responding_station_id;
  Role role = Role::Primary;

  bool operator==(const FireRecord&) const = default;
};

struct Station {
  std::string id;
  GeoPoint location;
  std::chrono::sys_days commissioned{};
  std::optional<int> staffing;

  bool operator==(const Station&) const = default;
};

}  // namespace stationplan
