#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stationplan/geo.hpp"
#include "stationplan/time.hpp"

namespace stationplan {

inline constexpr std::string_view kFireCountChannel = "fire_count";

/// The five grid attributes used by the forecaster, in display order.
inline constexpr std::array<std::string_view, 5> kDefaultFeatureNames = {
    "avg_temperature", "precipitation_days", "avg_enterprise_density", "avg_enterprise_size",
    "avg_population_density"};

/// Dense [time][channel][row][col] raster.  Channel 0 is always fire_count.
class SpatioTemporalTensor {
 public:
  SpatioTemporalTensor() = default;

  /// Zero-filled tensor.  Validates shape, monotone uniform timestamps and
  /// that channel 0 is fire_count.
  SpatioTemporalTensor(GridSpec grid, std::vector<YearMonth> timestamps,
                       std::vector<std::string> channels);

  const GridSpec& grid() const noexcept { return grid_; }
  std::span<const YearMonth> timestamps() const noexcept { return timestamps_; }
  std::span<const std::string> channels() const noexcept { return channels_; }
  std::size_t time_count() const noexcept { return timestamps_.size(); }
  std::size_t channel_count() const noexcept { return channels_.size(); }
  std::size_t cell_count() const noexcept { return grid_.cell_count(); }
  /// Months between consecutive timestamps (1 when fewer than two).
  int interval_months() const noexcept;

  std::optional<std::size_t> channel_index(std::string_view name) const noexcept;
  std::optional<std::size_t> time_index(YearMonth ym) const noexcept;

  std::size_t offset(std::size_t t, std::size_t c, std::size_t cell) const noexcept {
    return (t * channels_.size() + c) * grid_.cell_count() + cell;
  }
  double at(std::size_t t, std::size_t c, std::size_t cell) const noexcept {
    return values_[offset(t, c, cell)];
  }
  double& at(std::size_t t, std::size_t c, std::size_t cell) noexcept {
    return values_[offset(t, c, cell)];
  }
  double at(std::size_t t, std::size_t c, CellIndex cell) const noexcept {
    return at(t, c, grid_.flat(cell));
  }

  /// Row-major plane for one (t, c).
  std::span<const double> plane(std::size_t t, std::size_t c) const noexcept {
    return {values_.data() + offset(t, c, 0), grid_.cell_count()};
  }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> mutable_values() noexcept { return values_; }

  /// Copy of timestamps [begin, end).
  SpatioTemporalTensor slice(std::size_t begin, std::size_t end) const;

  /// Checks the fire_count channel holds non-negative integers and every
  /// value is finite.  Throws Error(validation_error) otherwise.
  void validate_values() const;

  bool operator==(const SpatioTemporalTensor&) const = default;

 private:
  GridSpec grid_;
  std::vector<YearMonth> timestamps_;
  std::vector<std::string> channels_;
  std::vector<double> values_;
};

}  // namespace stationplan
