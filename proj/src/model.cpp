#include "appwatch/model.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "appwatch/error.hpp"

namespace appwatch::model {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

bool LabelRule::matches(FeatureBits bits) const {
    return std::all_of(condition.begin(), condition.end(),
                       [bits](const Literal& lit) { return bits.get(lit.feature) == lit.value; });
}

std::string LabelRule::to_string() const {
    std::string out = name + ":";
    for (std::size_t i = 0; i < condition.size(); ++i) {
        out += i == 0 ? " " : " & ";
        out += fmt::format("{}={}", feature_name(condition[i].feature), condition[i].value ? 1 : 0);
    }
    return out;
}

std::vector<LabelRule> default_rules() {
    return {
        {"R1", {{Feature::OutSms, true}, {Feature::Screen, false}}},
        {"R2", {{Feature::OutCall, true}, {Feature::Screen, false}}},
        {"R3", {{Feature::OutSms, true}, {Feature::InCall, true}}},
        {"R4", {{Feature::OutCall, true}, {Feature::InSms, true}}},
    };
}

FeatureClass label_of(FeatureBits bits, const std::vector<LabelRule>& rules) {
    const bool hit = std::any_of(rules.begin(), rules.end(), [bits](const LabelRule& r) { return r.matches(bits); });
    return hit ? FeatureClass::Malicious : FeatureClass::Normal;
}

std::size_t NormalityModel::count(FeatureClass label) const {
    return static_cast<std::size_t>(
        std::count_if(patterns.begin(), patterns.end(), [label](const auto& p) { return p.label == label; }));
}

NormalityModel enumerate(std::vector<LabelRule> rules) {
    NormalityModel model;
    for (unsigned code = 0; code < kPatternCount; ++code) {
        const auto bits = FeatureBits::from_code(code);
        model.patterns[code] = {bits, label_of(bits, rules)};
    }
    model.rules = std::move(rules);
    return model;
}

std::vector<LabelRule> parse_rules(std::string_view text) {
    std::vector<LabelRule> rules;
    std::size_t line_no = 0;
    std::size_t from = 0;
    while (from <= text.size()) {
        auto nl = text.find('\n', from);
        if (nl == std::string_view::npos) nl = text.size();
        const auto line = trim(text.substr(from, nl - from));
        from = nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;

        auto fail = [&](const std::string& why) { throw ParseError(ParseError::Kind::Syntax, line_no, why); };
        const auto colon = line.find(':');
        if (colon == std::string_view::npos) fail("expected 'name: Field=0|1 & ...'");
        LabelRule rule;
        rule.name = std::string(trim(line.substr(0, colon)));
        if (rule.name.empty()) fail("rule name is empty");

        auto body = line.substr(colon + 1);
        while (true) {
            const auto amp = body.find('&');
            const auto lit = trim(body.substr(0, amp));
            const auto eq = lit.find('=');
            if (eq == std::string_view::npos) fail(fmt::format("expected 'Field=0|1', got '{}'", lit));
            const auto field = trim(lit.substr(0, eq));
            const auto value = trim(lit.substr(eq + 1));
            const auto feature = feature_from_name(field);
            if (!feature)
                fail(fmt::format("unknown field '{}' (expected OutCall, InCall, OutSMS, InSMS or Screen)", field));
            if (value != "0" && value != "1") fail(fmt::format("field '{}' must be 0 or 1, got '{}'", field, value));
            const bool dup = std::any_of(rule.condition.begin(), rule.condition.end(),
                                         [&](const Literal& l) { return l.feature == *feature; });
            if (dup) fail(fmt::format("field '{}' used twice in one rule", field));
            rule.condition.push_back({*feature, value == "1"});
            if (amp == std::string_view::npos) break;
            body = body.substr(amp + 1);
        }
        rules.push_back(std::move(rule));
    }
    return rules;
}

std::string write_rules(const std::vector<LabelRule>& rules) {
    std::string out;
    for (const auto& r : rules) out += r.to_string() + "\n";
    return out;
}

arff::Document to_training_arff(const NormalityModel& model, const AppId& placeholder_app, Timestamp base_time) {
    std::vector<FeatureInstance> rows;
    rows.reserve(kPatternCount);
    for (std::size_t i = 0; i < model.patterns.size(); ++i)
        rows.push_back({base_time + static_cast<std::int64_t>(i), placeholder_app, model.patterns[i].bits,
                        model.patterns[i].label});
    return to_arff(rows, kModelRelation);
}

}  // namespace appwatch::model
