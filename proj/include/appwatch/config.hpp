#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "appwatch/knn.hpp"
#include "appwatch/report.hpp"
#include "appwatch/simulate.hpp"

namespace appwatch::config {

// Line-oriented `key = value` text grouped under `[section]` headers.
// '#' and ';' start comment lines. Sections and keys may repeat; entries
// before the first header belong to the unnamed section "".

struct Entry {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

struct Section {
    std::string name;
    std::size_t line = 0;
    std::vector<Entry> entries;

    /// Last value given for `key`, if any.
    std::optional<std::string> get(std::string_view key) const;
    std::vector<std::string> all(std::string_view key) const;
};

struct Document {
    std::vector<Section> sections;

    std::vector<const Section*> find_all(std::string_view name) const;
    /// The last section called `name`.
    const Section* find(std::string_view name) const;
};

/// Throws ParseError naming the line.
Document parse(std::string_view text);

/// Scenario sections: [scenario], [benign], [session] and any number of
/// [injection] blocks. Unknown sections or keys are rejected. Throws
/// ConfigError naming the field.
simulate::Scenario scenario_from(const Document& doc);

struct PipelineConfig {
    std::int64_t tick = 60;
    knn::ClassifierConfig classifier;
    std::optional<std::string> rules_file;
    std::string placeholder_app = "normality-model";
    Timestamp base_time = Timestamp(0);
    std::uint64_t seed = 1;
    std::size_t folds = 10;
    std::vector<report::SinkSpec> sinks;  // defaults to stdout when empty
};

/// Pipeline sections: [pipeline] tick; [classifier] k, include_identifiers;
/// [model] rules, placeholder_app, base_time; [evaluate] folds, seed;
/// [report] sink (repeatable). Throws ConfigError naming the field.
PipelineConfig pipeline_from(const Document& doc);

}  // namespace appwatch::config
