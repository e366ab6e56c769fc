#include "appwatch/error.hpp"

#include <fmt/format.h>

namespace appwatch {

namespace {

std::string with_line(std::size_t line, const std::string& what) {
    return line == 0 ? what : fmt::format("line {}: {}", line, what);
}

std::string join_violations(const std::vector<std::string>& violations) {
    std::string out = fmt::format("trace has {} violation(s)", violations.size());
    for (const auto& v : violations) out += "\n  " + v;
    return out;
}

}  // namespace

ParseError::ParseError(Kind kind, std::size_t line, const std::string& what)
    : Error(with_line(line, what)), kind_(kind), line_(line) {}

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

}  // namespace appwatch
