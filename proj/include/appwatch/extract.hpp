#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "appwatch/arff.hpp"
#include "appwatch/events.hpp"

namespace appwatch {

/// The five monitored behaviour features, in ARFF column order.
enum class Feature { OutCall = 0, InCall = 1, OutSms = 2, InSms = 3, Screen = 4 };

inline constexpr std::size_t kFeatureCount = 5;
inline constexpr std::array<Feature, kFeatureCount> kAllFeatures{Feature::OutCall, Feature::InCall, Feature::OutSms,
                                                                 Feature::InSms, Feature::Screen};

/// ARFF / rule-file spelling: OutCall, InCall, OutSMS, InSMS, Screen.
std::string_view feature_name(Feature f);
std::optional<Feature> feature_from_name(std::string_view name);

/// Presence flags for the five features. Only 0/1 is representable.
class FeatureBits {
public:
    constexpr FeatureBits() = default;
    constexpr FeatureBits(bool out_call, bool in_call, bool out_sms, bool in_sms, bool screen)
        : mask_(static_cast<std::uint8_t>((out_call << 4) | (in_call << 3) | (out_sms << 2) | (in_sms << 1) |
                                          static_cast<int>(screen))) {}

    /// Binary-counter code with OutCall as the most significant bit; 0..31.
    static FeatureBits from_code(unsigned code);
    constexpr unsigned code() const { return mask_; }

    constexpr bool get(Feature f) const { return (mask_ >> (4 - static_cast<int>(f))) & 1U; }
    void set(Feature f, bool on);

    bool out_call() const { return get(Feature::OutCall); }
    bool in_call() const { return get(Feature::InCall); }
    bool out_sms() const { return get(Feature::OutSms); }
    bool in_sms() const { return get(Feature::InSms); }
    bool screen() const { return get(Feature::Screen); }

    /// "(0,0,1,0,0)" style rendering.
    std::string to_string() const;

    friend constexpr bool operator==(FeatureBits, FeatureBits) = default;

private:
    std::uint8_t mask_ = 0;
};

enum class FeatureClass { Normal, Malicious, Unknown };

std::string_view to_string(FeatureClass c);

struct FeatureInstance {
    Timestamp time;
    AppId app;
    FeatureBits bits;
    FeatureClass label = FeatureClass::Unknown;

    friend bool operator==(const FeatureInstance&, const FeatureInstance&) = default;
};

/// Folds a trace into per-app feature rows.
///
/// Rows are emitted
///  - at the window start and every `tick` seconds after it (boundaries
///    strictly before the window end), one per running app in start order,
///    before any event carrying the same timestamp; and
///  - immediately for each OutSms, InSms, OutCallStart and InCallStart,
///    for the acting app, with that feature set.
///
/// A row's call bits are 1 while the app has a call of that direction open;
/// the screen bit is the screen state at the moment of emission. SMS bits
/// only ever appear on the row emitted for the SMS itself, so tick rows
/// carry call and screen state alone. An app becomes running when it is an
/// initial app, receives AppStart, or performs any activity; AppStop removes it.
///
/// Throws ValidationError for invalid traces and Error for tick <= 0.
std::vector<FeatureInstance> extract(const EventTrace& trace, std::int64_t tick = 60);

inline constexpr std::string_view kFeatureRelation = "AppFeatureVectors";

/// Attribute names of the feature schema, in order.
inline constexpr std::array<std::string_view, 8> kSchemaNames{"Time",   "AppName", "OutCall", "InCall",
                                                              "OutSMS", "InSMS",   "Screen",  "Class"};

/// Header-row CSV using the same column order as the ARFF schema.
std::string to_csv(std::span<const FeatureInstance> instances);

/// ARFF document in the feature schema. AppName is nominal over the apps in
/// first-appearance order (declared `string` when there are no rows);
/// Unknown classes become missing values.
arff::Document to_arff(std::span<const FeatureInstance> instances, std::string_view relation = kFeatureRelation);

/// Throws SchemaError naming the first attribute that breaks the feature
/// schema (names/order; Time date; AppName nominal or string; bits {0,1};
/// Class nominal containing Normal and Malicious).
void check_feature_schema(const arff::Document& doc);

/// Reads rows back into instances. Requires the feature schema and no
/// missing values outside the Class column (throws SchemaError otherwise).
std::vector<FeatureInstance> from_arff(const arff::Document& doc);

}  // namespace appwatch
