#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace stationplan {

/// Wall-clock instant in the dataset's single configured zone, second resolution.
using Timestamp = std::chrono::sys_seconds;

/// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM" and "YYYY-MM-DDTHH:MM:SS" (a space
/// may replace the 'T'; a trailing 'Z' is ignored).  Returns nullopt on any
/// malformed or out-of-range field.
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::optional<std::chrono::sys_days> parse_date(std::string_view text);

std::string format_timestamp(Timestamp t);  // YYYY-MM-DDTHH:MM:SS
std::string format_date(std::chrono::sys_days d);

int year_of(Timestamp t);
int hour_of(Timestamp t);

/// Calendar month as a dense ordinal (year * 12 + month - 1).
class YearMonth {
 public:
  constexpr YearMonth() = default;
  constexpr YearMonth(int year, int month) : ordinal_(year * 12 + (month - 1)) {}

  static constexpr YearMonth from_ordinal(int ordinal) {
    YearMonth ym;
    ym.ordinal_ = ordinal;
    return ym;
  }
  static YearMonth of(Timestamp t);
  static std::optional<YearMonth> parse(std::string_view text);  // "YYYY-MM"

  constexpr int ordinal() const { return ordinal_; }
  constexpr int year() const { return ordinal_ >= 0 ? ordinal_ / 12 : -((-ordinal_ + 11) / 12); }
  constexpr int month() const { return ordinal_ - year() * 12 + 1; }

  constexpr YearMonth operator+(int months) const { return from_ordinal(ordinal_ + months); }
  constexpr int operator-(YearMonth other) const { return ordinal_ - other.ordinal_; }
  constexpr auto operator<=>(const YearMonth&) const = default;

  std::string to_string() const;

 private:
  int ordinal_ = 0;
};

}  // namespace stationplan
