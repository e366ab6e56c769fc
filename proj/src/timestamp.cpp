#include "appwatch/timestamp.hpp"

#include <array>
#include <cctype>
#include <chrono>
#include <vector>

#include <fmt/format.h>

#include "appwatch/error.hpp"

namespace appwatch {

namespace {

enum class Field { Month, Day, Year, Hour, Minute, Second };

struct PatternPiece {
    bool is_field = false;
    Field field = Field::Year;
    std::string literal;
};

int field_width(Field f) { return f == Field::Year ? 4 : 2; }

std::vector<PatternPiece> compile_pattern(std::string_view pattern) {
    std::vector<PatternPiece> pieces;
    std::array<bool, 6> seen{};
    std::size_t i = 0;
    while (i < pattern.size()) {
        const char c = pattern[i];
        if (!std::isalpha(static_cast<unsigned char>(c))) {
            if (pieces.empty() || pieces.back().is_field) pieces.push_back({});
            pieces.back().literal.push_back(c);
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < pattern.size() && pattern[j] == c) ++j;
        const std::string_view token = pattern.substr(i, j - i);
        Field field;
        if (token == "MM") field = Field::Month;
        else if (token == "dd") field = Field::Day;
        else if (token == "yyyy") field = Field::Year;
        else if (token == "HH") field = Field::Hour;
        else if (token == "mm") field = Field::Minute;
        else if (token == "ss") field = Field::Second;
        else
            throw DateError(DateError::Kind::PatternToken,
                            fmt::format("unsupported date pattern token '{}' in '{}'", token, pattern));
        auto& flag = seen[static_cast<std::size_t>(field)];
        if (flag)
            throw DateError(DateError::Kind::PatternToken,
                            fmt::format("date pattern token '{}' repeated in '{}'", token, pattern));
        flag = true;
        pieces.push_back({true, field, {}});
        i = j;
    }
    return pieces;
}

}  // namespace

Timestamp::Timestamp(std::int64_t seconds) : seconds_(seconds) {
    if (seconds < 0 || seconds > kMaxTimestampSeconds)
        throw DateError(DateError::Kind::Calendar, fmt::format("timestamp {} out of range", seconds));
}

void check_date_pattern(std::string_view pattern) { (void)compile_pattern(pattern); }

Timestamp parse_date(std::string_view text, std::string_view pattern) {
    const auto pieces = compile_pattern(pattern);
    std::array<int, 6> value{1, 1, 1970, 0, 0, 0};
    std::size_t pos = 0;
    for (const auto& piece : pieces) {
        if (!piece.is_field) {
            if (text.substr(pos, piece.literal.size()) != piece.literal)
                throw DateError(DateError::Kind::Format,
                                fmt::format("'{}' does not match date pattern '{}'", text, pattern));
            pos += piece.literal.size();
            continue;
        }
        const int width = field_width(piece.field);
        if (pos + width > text.size())
            throw DateError(DateError::Kind::Format,
                            fmt::format("'{}' does not match date pattern '{}'", text, pattern));
        int v = 0;
        for (int k = 0; k < width; ++k) {
            const char d = text[pos + k];
            if (d < '0' || d > '9')
                throw DateError(DateError::Kind::Format,
                                fmt::format("'{}' does not match date pattern '{}'", text, pattern));
            v = v * 10 + (d - '0');
        }
        value[static_cast<std::size_t>(piece.field)] = v;
        pos += width;
    }
    if (pos != text.size())
        throw DateError(DateError::Kind::Format,
                        fmt::format("trailing characters in '{}' for date pattern '{}'", text, pattern));

    using namespace std::chrono;
    const auto [month, day, year, hour, minute, second] = value;
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                             std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok() || year < 1970 || hour > 23 || minute > 59 || second > 59)
        throw DateError(DateError::Kind::Calendar, fmt::format("'{}' is not a valid calendar time", text));
    const std::int64_t days = sys_days{ymd}.time_since_epoch().count();
    return Timestamp(days * 86400 + hour * 3600 + minute * 60 + second);
}

std::string format_date(Timestamp ts, std::string_view pattern) {
    using namespace std::chrono;
    const auto pieces = compile_pattern(pattern);
    const std::int64_t days = ts.seconds() / 86400;
    const std::int64_t rem = ts.seconds() % 86400;
    const year_month_day ymd{sys_days{std::chrono::days{days}}};
    const std::array<int, 6> value{static_cast<int>(static_cast<unsigned>(ymd.month())),
                                   static_cast<int>(static_cast<unsigned>(ymd.day())),
                                   static_cast<int>(ymd.year()),
                                   static_cast<int>(rem / 3600),
                                   static_cast<int>(rem % 3600 / 60),
                                   static_cast<int>(rem % 60)};
    std::string out;
    for (const auto& piece : pieces) {
        if (!piece.is_field) {
            out += piece.literal;
            continue;
        }
        out += fmt::format("{:0{}d}", value[static_cast<std::size_t>(piece.field)], field_width(piece.field));
    }
    return out;
}

}  // namespace appwatch
