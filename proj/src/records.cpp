#include "stationplan/records.hpp"

namespace stationplan {

std::string_view to_string(Role r) noexcept { return r == Role::Primary ? "primary" : "backup"; }

std::optional<Role> parse_role(std::string_view text) noexcept {
  if (text == "primary") return Role::Primary;
  if (text == "backup") return Role::Backup;
  return std::nullopt;
}

}  // namespace stationplan
