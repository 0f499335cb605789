#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace hmem {

// UTC seconds since the Unix epoch.
using Timestamp = std::int64_t;

// "2023-06-01T10:00:00Z"
std::string format_iso8601(Timestamp ts);

// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS[.fff]]" with an optional "Z" or
// "+HH:MM"/"-HH:MM" suffix. A space may replace the 'T'.
std::optional<Timestamp> parse_iso8601(std::string_view text);

Timestamp days_from_civil(int year, unsigned month, unsigned day);

Timestamp now_utc();

}  // namespace hmem
