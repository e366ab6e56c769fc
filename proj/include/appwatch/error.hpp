#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace appwatch {

/// Base for every error the library raises on bad input or configuration.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input. `line` is 1-based; 0 means "no line context".
class ParseError : public Error {
public:
    enum class Kind { Syntax, Arity, UnknownNominal, Date };

    ParseError(Kind kind, std::size_t line, const std::string& what);

    Kind kind() const noexcept { return kind_; }
    std::size_t line() const noexcept { return line_; }

private:
    Kind kind_;
    std::size_t line_;
};

/// Date pattern / calendar problems raised by the date codec.
class DateError : public Error {
public:
    enum class Kind { PatternToken, Calendar, Format };

    DateError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Invalid scenario / pipeline configuration. `field` names the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Two ARFF documents (or a document and the feature schema) disagree.
class SchemaError : public Error {
public:
    SchemaError(std::string attribute, const std::string& what)
        : Error("attribute '" + attribute + "': " + what), attribute_(std::move(attribute)) {}

    const std::string& attribute() const noexcept { return attribute_; }

private:
    std::string attribute_;
};

/// A trace failed validation; carries the rendered violation list.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> violations);

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

}  // namespace appwatch
