#pragma once

#include <stdexcept>
#include <string>

namespace stationplan {

/// Error raised by every stationplan module.  `code()` is a stable,
/// machine-readable identifier (used by the CLI and HTTP layers); `what()`
/// carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

namespace errc {
inline constexpr const char* kInvalidArgument = "invalid_argument";
inline constexpr const char* kParse = "parse_error";
inline constexpr const char* kOutOfBounds = "out_of_bounds";
inline constexpr const char* kNotFound = "not_found";
inline constexpr const char* kShapeMismatch = "shape_mismatch";
inline constexpr const char* kInsufficientHistory = "insufficient_history";
inline constexpr const char* kValidation = "validation_error";
inline constexpr const char* kIo = "io_error";
}  // namespace errc

}  // namespace stationplan
