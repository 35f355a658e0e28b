#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace furstenberg {

enum class ErrorKind {
  invalid_input,
  invalid_scale,
  invalid_parameter,
  stale_resolution,
  insufficient_data,
  resource,
  domain,
  unsupported_scale,
  degenerate_step,
  inconsistent_input,
  invalid_witness,
  not_in_family,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; callers switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace furstenberg
