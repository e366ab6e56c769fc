#include "appwatch/arff.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "appwatch/error.hpp"

namespace appwatch::arff {

namespace {

using Kind = ParseError::Kind;

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

struct Token {
    std::string text;
    bool quoted = false;
};

/// Cursor over one line of header or data text.
class Lexer {
public:
    Lexer(std::string_view line, std::size_t line_no) : s_(line), line_(line_no) {}

    void skip_space() {
        while (pos_ < s_.size() && is_space(s_[pos_])) ++pos_;
    }
    bool at_end() {
        skip_space();
        return pos_ >= s_.size();
    }
    char peek() {
        skip_space();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    void expect(char c) {
        if (peek() != c) fail(fmt::format("expected '{}'", c));
        ++pos_;
    }
    std::string_view rest() {
        skip_space();
        return s_.substr(pos_);
    }

    /// Reads a quoted token or a bare token ending at whitespace or any of `stops`.
    Token token(std::string_view stops) {
        skip_space();
        if (pos_ >= s_.size()) fail("unexpected end of line");
        const char q = s_[pos_];
        if (q == '\'' || q == '"') {
            ++pos_;
            Token t{{}, true};
            while (true) {
                if (pos_ >= s_.size()) fail("unterminated quoted token");
                const char c = s_[pos_++];
                if (c == q) {
                    if (pos_ < s_.size() && s_[pos_] == q) {
                        t.text.push_back(q);
                        ++pos_;
                        continue;
                    }
                    return t;
                }
                t.text.push_back(c);
            }
        }
        const std::size_t from = pos_;
        while (pos_ < s_.size() && !is_space(s_[pos_]) && stops.find(s_[pos_]) == std::string_view::npos) ++pos_;
        if (pos_ == from) fail(fmt::format("unexpected '{}'", s_[pos_]));
        return {std::string(s_.substr(from, pos_ - from)), false};
    }

    /// Data-row cell: bare cells may contain inner spaces, ending at ',' or end of line.
    Token cell() {
        skip_space();
        if (pos_ < s_.size() && (s_[pos_] == '\'' || s_[pos_] == '"')) return token(",");
        const std::size_t from = pos_;
        while (pos_ < s_.size() && s_[pos_] != ',') {
            if (s_[pos_] == '\'' || s_[pos_] == '"') fail("quote inside unquoted value");
            ++pos_;
        }
        return {std::string(trim(s_.substr(from, pos_ - from))), false};
    }

    [[noreturn]] void fail(const std::string& why, Kind kind = Kind::Syntax) const {
        throw ParseError(kind, line_, why);
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
    std::size_t line_;
};

AttributeType parse_type(Lexer& lx) {
    if (lx.peek() == '{') {
        lx.expect('{');
        Nominal nominal;
        std::set<std::string> seen;
        if (lx.peek() == '}') lx.fail("nominal value list must not be empty");
        while (true) {
            auto t = lx.token(",}");
            if (!seen.insert(t.text).second) lx.fail(fmt::format("duplicate nominal value '{}'", t.text));
            nominal.values.push_back(std::move(t.text));
            const char c = lx.peek();
            if (c == ',') {
                lx.expect(',');
                continue;
            }
            if (c == '}') {
                lx.expect('}');
                break;
            }
            lx.fail("expected ',' or '}' in nominal value list");
        }
        if (!lx.at_end()) lx.fail("unexpected text after nominal value list");
        return nominal;
    }
    const auto kw = lx.token("{");
    if (iequals(kw.text, "numeric") || iequals(kw.text, "real") || iequals(kw.text, "integer")) {
        if (!lx.at_end()) lx.fail("unexpected text after numeric type");
        return Numeric{};
    }
    if (iequals(kw.text, "string")) {
        if (!lx.at_end()) lx.fail("unexpected text after string type");
        return String{};
    }
    if (iequals(kw.text, "date")) {
        if (lx.at_end()) lx.fail("date attribute requires a format pattern");
        auto pattern = lx.token("");
        if (!lx.at_end()) lx.fail("unexpected text after date pattern");
        try {
            check_date_pattern(pattern.text);
        } catch (const DateError& e) {
            lx.fail(e.what(), Kind::Date);
        }
        return Date{std::move(pattern.text)};
    }
    if (iequals(kw.text, "relational")) lx.fail("relational attributes are not supported");
    lx.fail(fmt::format("unknown attribute type '{}'", kw.text));
}

Value convert_cell(const AttributeDecl& attr, const Token& cell, Lexer& lx, std::size_t row_no) {
    if (!cell.quoted && cell.text == "?") return Missing{};
    return std::visit(
        [&](const auto& type) -> Value {
            using T = std::decay_t<decltype(type)>;
            if constexpr (std::is_same_v<T, Nominal>) {
                if (!attr.nominal_index(cell.text))
                    lx.fail(fmt::format("row {}: value '{}' is not declared for nominal attribute '{}'", row_no,
                                        cell.text, attr.name),
                            Kind::UnknownNominal);
                return cell.text;
            } else if constexpr (std::is_same_v<T, String>) {
                return cell.text;
            } else if constexpr (std::is_same_v<T, Numeric>) {
                double v = 0;
                const char* first = cell.text.data();
                const char* last = first + cell.text.size();
                auto [ptr, ec] = std::from_chars(first, last, v);
                if (cell.text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v))
                    lx.fail(fmt::format("row {}: '{}' is not a number (attribute '{}')", row_no, cell.text,
                                        attr.name));
                return v;
            } else {
                try {
                    return parse_date(cell.text, type.pattern);
                } catch (const DateError& e) {
                    lx.fail(fmt::format("row {}: attribute '{}': {}", row_no, attr.name, e.what()), Kind::Date);
                }
            }
        },
        attr.type);
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string render_value(const AttributeDecl& attr, const Value& v) {
    return std::visit(
        [&](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Missing>) return "?";
            else if constexpr (std::is_same_v<T, double>) return format_number(x);
            else if constexpr (std::is_same_v<T, std::string>) return quote_if_needed(x);
            else return quote_if_needed(format_date(x, std::get<Date>(attr.type).pattern));
        },
        v);
}

std::string render_type(const AttributeType& type) {
    return std::visit(
        [](const auto& t) -> std::string {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, Nominal>) {
                std::string out = "{";
                for (std::size_t i = 0; i < t.values.size(); ++i) {
                    if (i > 0) out += ',';
                    out += quote_if_needed(t.values[i]);
                }
                return out + "}";
            } else if constexpr (std::is_same_v<T, Date>) {
                return "date " + quote_if_needed(t.pattern);
            } else if constexpr (std::is_same_v<T, Numeric>) {
                return "numeric";
            } else {
                return "string";
            }
        },
        type);
}

}  // namespace

std::optional<std::size_t> AttributeDecl::nominal_index(std::string_view value) const {
    const auto* nominal = std::get_if<Nominal>(&type);
    if (!nominal) return std::nullopt;
    const auto it = std::find(nominal->values.begin(), nominal->values.end(), value);
    if (it == nominal->values.end()) return std::nullopt;
    return static_cast<std::size_t>(it - nominal->values.begin());
}

std::optional<std::size_t> Document::attribute_index(std::string_view name) const {
    for (std::size_t i = 0; i < attributes.size(); ++i)
        if (attributes[i].name == name) return i;
    return std::nullopt;
}

std::string quote_if_needed(std::string_view token) {
    const bool needs = token.empty() || token == "?" || token.front() == '%' || token.front() == '@' ||
                       token.find_first_of(" ,'\"\t{}") != std::string_view::npos;
    if (!needs) return std::string(token);
    std::string out = "'";
    for (char c : token) {
        if (c == '\'') out += '\'';
        out += c;
    }
    return out + "'";
}

void check(const Document& doc) {
    std::set<std::string> names;
    for (const auto& attr : doc.attributes) {
        if (!names.insert(attr.name).second) throw Error(fmt::format("duplicate attribute '{}'", attr.name));
        if (const auto* n = std::get_if<Nominal>(&attr.type)) {
            if (n->values.empty()) throw Error(fmt::format("nominal attribute '{}' has no values", attr.name));
            std::set<std::string> seen(n->values.begin(), n->values.end());
            if (seen.size() != n->values.size())
                throw Error(fmt::format("nominal attribute '{}' has duplicate values", attr.name));
        }
        if (const auto* d = std::get_if<Date>(&attr.type)) check_date_pattern(d->pattern);
    }
    for (std::size_t r = 0; r < doc.rows.size(); ++r) {
        const auto& row = doc.rows[r];
        if (row.size() != doc.attributes.size())
            throw Error(fmt::format("row {} has {} values, expected {}", r, row.size(), doc.attributes.size()));
        for (std::size_t a = 0; a < row.size(); ++a) {
            const auto& attr = doc.attributes[a];
            const auto& v = row[a];
            if (std::holds_alternative<Missing>(v)) continue;
            const bool ok = std::visit(
                [&](const auto& t) {
                    using T = std::decay_t<decltype(t)>;
                    if constexpr (std::is_same_v<T, Nominal>)
                        return std::holds_alternative<std::string>(v) &&
                               attr.nominal_index(std::get<std::string>(v)).has_value();
                    else if constexpr (std::is_same_v<T, String>)
                        return std::holds_alternative<std::string>(v);
                    else if constexpr (std::is_same_v<T, Numeric>)
                        return std::holds_alternative<double>(v) && std::isfinite(std::get<double>(v));
                    else
                        return std::holds_alternative<Timestamp>(v);
                },
                attr.type);
            if (!ok) throw Error(fmt::format("row {}: invalid value for attribute '{}'", r, attr.name));
        }
    }
}

Document parse(std::string_view text) {
    Document doc;
    enum class State { Relation, Attributes, Data } state = State::Relation;
    std::size_t line_no = 0;
    std::size_t from = 0;
    while (from <= text.size()) {
        auto nl = text.find('\n', from);
        if (nl == std::string_view::npos) nl = text.size();
        const std::string_view raw = text.substr(from, nl - from);
        from = nl + 1;
        ++line_no;

        const auto line = trim(raw);
        if (line.empty() || line.front() == '%') continue;
        Lexer lx(line, line_no);

        if (state == State::Data) {
            if (line.front() == '{') lx.fail("sparse rows are not supported");
            Row row;
            row.reserve(doc.attributes.size());
            const std::size_t row_no = doc.rows.size() + 1;
            while (true) {
                const auto cell = lx.cell();
                if (row.size() >= doc.attributes.size())
                    lx.fail(fmt::format("row {} has more than {} values", row_no, doc.attributes.size()),
                            Kind::Arity);
                row.push_back(convert_cell(doc.attributes[row.size()], cell, lx, row_no));
                if (lx.at_end()) break;
                lx.expect(',');
            }
            if (row.size() != doc.attributes.size())
                lx.fail(fmt::format("row {} has {} values, expected {}", row_no, row.size(), doc.attributes.size()),
                        Kind::Arity);
            doc.rows.push_back(std::move(row));
            continue;
        }

        if (line.front() != '@') lx.fail("expected a declaration starting with '@'");
        const auto keyword = lx.token("{");
        if (state == State::Relation) {
            if (!iequals(keyword.text, "@relation")) lx.fail("expected '@relation'");
            doc.relation = lx.token("").text;
            if (!lx.at_end()) lx.fail("unexpected text after relation name");
            state = State::Attributes;
        } else if (iequals(keyword.text, "@attribute")) {
            AttributeDecl attr;
            attr.name = lx.token("{").text;
            if (doc.attribute_index(attr.name)) lx.fail(fmt::format("duplicate attribute '{}'", attr.name));
            attr.type = parse_type(lx);
            doc.attributes.push_back(std::move(attr));
        } else if (iequals(keyword.text, "@data")) {
            if (!lx.at_end()) lx.fail("unexpected text after '@data'");
            if (doc.attributes.empty()) lx.fail("'@data' before any '@attribute'");
            state = State::Data;
        } else {
            lx.fail(fmt::format("expected '@attribute' or '@data', got '{}'", keyword.text));
        }
    }
    if (state != State::Data)
        throw ParseError(Kind::Syntax, line_no, state == State::Relation ? "missing '@relation'" : "missing '@data'");
    return doc;
}

std::string serialize(const Document& doc) {
    std::string out = "@relation " + quote_if_needed(doc.relation) + "\n";
    for (const auto& attr : doc.attributes)
        out += "@attribute " + quote_if_needed(attr.name) + " " + render_type(attr.type) + "\n";
    out += "@data\n";
    for (const auto& row : doc.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out += ',';
            out += render_value(doc.attributes[i], row[i]);
        }
        out += '\n';
    }
    return out;
}

Document string_to_nominal(Document doc, std::size_t index) {
    if (index >= doc.attributes.size()) throw Error(fmt::format("no attribute at index {}", index));
    auto& attr = doc.attributes[index];
    if (!std::holds_alternative<String>(attr.type))
        throw Error(fmt::format("attribute '{}' is not a string attribute", attr.name));
    Nominal nominal;
    std::set<std::string> seen;
    for (const auto& row : doc.rows) {
        const auto* s = std::get_if<std::string>(&row[index]);
        if (s && seen.insert(*s).second) nominal.values.push_back(*s);
    }
    if (nominal.values.empty())
        throw Error(fmt::format("attribute '{}' has no values to turn into a nominal domain", attr.name));
    attr.type = std::move(nominal);
    return doc;
}

}  // namespace appwatch::arff
