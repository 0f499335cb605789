#include "hmem/error.hpp"

namespace hmem {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::not_found: return "not-found";
    case ErrorCode::backend_error: return "backend-error";
    case ErrorCode::extraction_error: return "extraction-error";
    case ErrorCode::io_error: return "io-error";
    case ErrorCode::corrupt_data: return "corrupt-data";
    case ErrorCode::config_error: return "config-error";
  }
  return "unknown";
}

}  // namespace hmem
