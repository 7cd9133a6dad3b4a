#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace ossrisk {

using Timestamp = std::chrono::sys_seconds;

// Accepts `YYYY-MM-DD`, `YYYY-MM-DDTHH:MM[:SS[.fff]]` with an optional `Z` or
// `+HH:MM`/`-HH:MM` offset (a space may replace the `T`). Fractional seconds are
// truncated. Returns nullopt for anything else.
std::optional<Timestamp> parse_iso8601(std::string_view text);

// `YYYY-MM-DDTHH:MM:SSZ`
std::string format_iso8601(Timestamp t);

// Half-open [start, end); a missing bound is unbounded.
struct TimeWindow {
    std::optional<Timestamp> start;
    std::optional<Timestamp> end;

    bool contains(Timestamp t) const;
    bool bounded() const { return start.has_value() && end.has_value(); }
    // Length in days, or nullopt if unbounded.
    std::optional<double> days() const;
};

} // namespace ossrisk
