#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "appwatch/arff.hpp"
#include "appwatch/extract.hpp"

namespace appwatch::model {

struct Literal {
    Feature feature;
    bool value;
    friend bool operator==(const Literal&, const Literal&) = default;
};

/// Conjunction of feature literals; a match labels the pattern Malicious.
struct LabelRule {
    std::string name;
    std::vector<Literal> condition;

    bool matches(FeatureBits bits) const;
    /// "R1: OutSMS=1 & Screen=0"
    std::string to_string() const;

    friend bool operator==(const LabelRule&, const LabelRule&) = default;
};

/// The four built-in rules, in order:
///   R1  OutSMS=1 & Screen=0   SMS sent while the user is idle
///   R2  OutCall=1 & Screen=0  call placed while the user is idle
///   R3  OutSMS=1 & InCall=1   SMS sent during an incoming call
///   R4  OutCall=1 & InSMS=1   call placed while an SMS is received
/// Under exhaustive enumeration they label 13 patterns Normal and 19 Malicious.
std::vector<LabelRule> default_rules();

struct LabeledPattern {
    FeatureBits bits;
    FeatureClass label;
};

inline constexpr std::size_t kPatternCount = 1U << kFeatureCount;

struct NormalityModel {
    std::vector<LabelRule> rules;
    /// All 32 patterns, ordered by FeatureBits::code() (OutCall most significant).
    std::array<LabeledPattern, kPatternCount> patterns;

    std::size_t count(FeatureClass label) const;
};

/// Malicious iff any rule matches.
FeatureClass label_of(FeatureBits bits, const std::vector<LabelRule>& rules);

NormalityModel enumerate(std::vector<LabelRule> rules);

/// Rule file: one `name: Field=0|1 & Field=0|1 ...` per line; blank lines and
/// lines starting with '#' are ignored. Throws ParseError naming the line.
std::vector<LabelRule> parse_rules(std::string_view text);
std::string write_rules(const std::vector<LabelRule>& rules);

inline constexpr std::string_view kModelRelation = "NormalityModel";

/// 32-row training document in the feature schema. Row i gets time
/// `base_time + i` seconds and `placeholder_app` as its app.
arff::Document to_training_arff(const NormalityModel& model, const AppId& placeholder_app, Timestamp base_time);

}  // namespace appwatch::model
