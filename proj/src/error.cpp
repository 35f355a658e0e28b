#include "furstenberg/error.hpp"

namespace furstenberg {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::invalid_scale: return "invalid-scale";
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::stale_resolution: return "stale-resolution";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::resource: return "resource";
    case ErrorKind::domain: return "domain";
    case ErrorKind::unsupported_scale: return "unsupported-scale";
    case ErrorKind::degenerate_step: return "degenerate-step";
    case ErrorKind::inconsistent_input: return "inconsistent-input";
    case ErrorKind::invalid_witness: return "invalid-witness";
    case ErrorKind::not_in_family: return "not-in-family";
  }
  return "unknown";
}

}  // namespace furstenberg
