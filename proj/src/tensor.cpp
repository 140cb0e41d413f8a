#include "stationplan/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "stationplan/error.hpp"

namespace stationplan {

SpatioTemporalTensor::SpatioTemporalTensor(GridSpec grid, std::vector<YearMonth> timestamps,
                                           std::vector<std::string> channels)
    : grid_(grid), timestamps_(std::move(timestamps)), channels_(std::move(channels)) {
  validate(grid_);
  if (channels_.empty() || channels_.front() != kFireCountChannel) {
    throw Error(errc::kInvalidArgument, "tensor channel 0 must be fire_count");
  }
  for (std::size_t a = 0; a < channels_.size(); ++a) {
    for (std::size_t b = a + 1; b < channels_.size(); ++b) {
      if (channels_[a] == channels_[b]) {
        throw Error(errc::kInvalidArgument, "duplicate tensor channel '" + channels_[a] + "'");
      }
    }
  }
  if (timestamps_.size() >= 2) {
    const int step = timestamps_[1] - timestamps_[0];
    if (step <= 0) throw Error(errc::kInvalidArgument, "tensor timestamps must be increasing");
    for (std::size_t t = 1; t < timestamps_.size(); ++t) {
      if (timestamps_[t] - timestamps_[t - 1] != step) {
        throw Error(errc::kInvalidArgument, "tensor timestamps must be uniformly spaced");
      }
    }
  }
  values_.assign(timestamps_.size() * channels_.size() * grid_.cell_count(), 0.0);
}

int SpatioTemporalTensor::interval_months() const noexcept {
  return timestamps_.size() >= 2 ? timestamps_[1] - timestamps_[0] : 1;
}

std::optional<std::size_t> SpatioTemporalTensor::channel_index(std::string_view name) const noexcept {
  const auto it = std::find(channels_.begin(), channels_.end(), name);
  if (it == channels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - channels_.begin());
}

std::optional<std::size_t> SpatioTemporalTensor::time_index(YearMonth ym) const noexcept {
  const auto it = std::lower_bound(timestamps_.begin(), timestamps_.end(), ym);
  if (it == timestamps_.end() || *it != ym) return std::nullopt;
  return static_cast<std::size_t>(it - timestamps_.begin());
}

SpatioTemporalTensor SpatioTemporalTensor::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > timestamps_.size()) {
    throw Error(errc::kOutOfBounds, "tensor slice out of range");
  }
  SpatioTemporalTensor out(grid_, {timestamps_.begin() + static_cast<std::ptrdiff_t>(begin),
                                   timestamps_.begin() + static_cast<std::ptrdiff_t>(end)},
                           channels_);
  const std::size_t stride = channels_.size() * grid_.cell_count();
  std::copy(values_.begin() + static_cast<std::ptrdiff_t>(begin * stride),
            values_.begin() + static_cast<std::ptrdiff_t>(end * stride), out.values_.begin());
  return out;
}

void SpatioTemporalTensor::validate_values() const {
  if (values_.size() != timestamps_.size() * channels_.size() * grid_.cell_count()) {
    throw Error(errc::kValidation, "tensor value count does not match its shape");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(errc::kValidation, "tensor holds a non-finite value");
  }
  for (std::size_t t = 0; t < timestamps_.size(); ++t) {
    for (double v : plane(t, 0)) {
      if (v < 0.0 || v != std::floor(v)) {
        throw Error(errc::kValidation, "fire_count must hold non-negative integers");
      }
    }
  }
}

}  // namespace stationplan
