#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace appwatch {

/// Whole seconds since 1970-01-01 00:00:00 (no time zone; all values are
/// treated as civil time). Non-negative by construction.
class Timestamp {
public:
    constexpr Timestamp() = default;
    explicit Timestamp(std::int64_t seconds);

    constexpr std::int64_t seconds() const noexcept { return seconds_; }

    Timestamp operator+(std::int64_t delta) const { return Timestamp(seconds_ + delta); }

    friend constexpr auto operator<=>(Timestamp, Timestamp) = default;

private:
    std::int64_t seconds_ = 0;
};

/// The pattern used by traces, CSV and the feature ARFF schema.
inline constexpr std::string_view kDefaultDatePattern = "MM.dd.yyyy HH:mm:ss";

/// Latest representable instant (9999-12-31 23:59:59); four-digit years only.
inline constexpr std::int64_t kMaxTimestampSeconds = 253402300799;

/// Parses `text` against `pattern`. Patterns may use the tokens MM, dd, yyyy,
/// HH, mm, ss (each at most once) and any non-letter literal characters.
/// Absent tokens default to 1970-01-01 00:00:00.
/// Throws DateError on a bad pattern, a text/pattern mismatch, or an
/// impossible calendar date (month 13, Feb 30, hour 24, ...).
Timestamp parse_date(std::string_view text, std::string_view pattern = kDefaultDatePattern);

/// Inverse of parse_date on valid inputs. Throws DateError on a bad pattern.
std::string format_date(Timestamp ts, std::string_view pattern = kDefaultDatePattern);

/// Throws DateError unless `pattern` is made only of supported tokens and literals.
void check_date_pattern(std::string_view pattern);

}  // namespace appwatch
