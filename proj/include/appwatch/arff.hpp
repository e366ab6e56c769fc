#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "appwatch/timestamp.hpp"

namespace appwatch::arff {

struct Missing {
    friend bool operator==(Missing, Missing) = default;
};

/// A cell value. Nominal and string attributes hold std::string, numeric
/// attributes double, date attributes Timestamp.
using Value = std::variant<Missing, double, std::string, Timestamp>;

struct Nominal {
    std::vector<std::string> values;  // non-empty, duplicate-free
    friend bool operator==(const Nominal&, const Nominal&) = default;
};
struct Date {
    std::string pattern;
    friend bool operator==(const Date&, const Date&) = default;
};
struct Numeric {
    friend bool operator==(Numeric, Numeric) = default;
};
struct String {
    friend bool operator==(String, String) = default;
};

using AttributeType = std::variant<Nominal, Date, Numeric, String>;

struct AttributeDecl {
    std::string name;
    AttributeType type;

    bool is_nominal() const { return std::holds_alternative<Nominal>(type); }
    /// Position of `value` in the nominal list, if this is a nominal attribute containing it.
    std::optional<std::size_t> nominal_index(std::string_view value) const;

    friend bool operator==(const AttributeDecl&, const AttributeDecl&) = default;
};

using Row = std::vector<Value>;

struct Document {
    std::string relation;
    std::vector<AttributeDecl> attributes;
    std::vector<Row> rows;

    std::optional<std::size_t> attribute_index(std::string_view name) const;

    friend bool operator==(const Document&, const Document&) = default;
};

/// Throws Error when the document breaks an invariant: empty or duplicated
/// nominal values, bad date pattern, wrong row arity, or a value whose type
/// or nominal membership does not match its attribute.
void check(const Document& doc);

/// Parses the ARFF subset: case-insensitive @relation/@attribute/@data,
/// '%' comment lines, blank lines, single- or double-quoted tokens (a quote
/// inside is doubled), '?' for missing values, and the attribute types
/// nominal, date '<pattern>', numeric/real/integer and string.
///
/// Throws ParseError carrying the line number: Kind::Syntax for grammar
/// problems, Kind::Arity for rows of the wrong length, Kind::UnknownNominal
/// for undeclared nominal values and Kind::Date for unparseable dates.
Document parse(std::string_view text);

/// Canonical text: lowercase keywords, one declaration per line, tokens
/// single-quoted only when they need it, '?' for missing values.
std::string serialize(const Document& doc);

/// Quotes `token` (doubling inner single quotes) when a bare token would not
/// read back as the same value.
std::string quote_if_needed(std::string_view token);

/// Converts the string attribute at `index` into a nominal one whose values
/// are the distinct row values in order of first appearance. Throws Error if
/// the attribute is not a string attribute.
Document string_to_nominal(Document doc, std::size_t index);

}  // namespace appwatch::arff
