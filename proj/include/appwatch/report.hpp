#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "appwatch/arff.hpp"
#include "appwatch/knn.hpp"

namespace appwatch::report {

/// Where a report goes: `stdout`, `file:<path>` or an `http://` URL.
struct SinkSpec {
    enum class Kind { Stdout, File, Http };
    Kind kind = Kind::Stdout;
    std::string target;  // path or URL

    /// Throws ConfigError("sink") for anything else (including https).
    static SinkSpec parse(std::string_view text);
    std::string describe() const;

    friend bool operator==(const SinkSpec&, const SinkSpec&) = default;
};

struct InstanceResult {
    std::optional<Timestamp> time;
    std::optional<std::string> app;
    std::array<std::optional<bool>, kFeatureCount> bits;
    FeatureClass predicted = FeatureClass::Normal;
    std::size_t nearest = 0;  // training-row index of the nearest neighbour
};

struct DetectionReport {
    std::optional<Timestamp> generated_at;  // latest instance time
    std::vector<InstanceResult> instances;
    std::vector<std::string> flagged_apps;  // first-appearance order
    std::size_t normal = 0;
    std::size_t malicious = 0;
};

/// `labeled` rows and `predictions` must line up one to one.
DetectionReport build(const arff::Document& labeled, std::span<const knn::Prediction> predictions);

nlohmann::json to_json(const DetectionReport& report);

/// One `MALICIOUS: <app> at <time>` line per malicious instance, then a summary line.
std::string notification_text(const DetectionReport& report);

struct Payload {
    std::string text;  // for stdout
    std::string json;  // for file and http sinks
};

struct DeliveryFailure {
    SinkSpec sink;
    std::string reason;
};

/// Sends `payload` to every sink and returns the ones that failed. An http
/// sink succeeds on a 2xx answer to a single POST with content type
/// application/json.
std::vector<DeliveryFailure> dispatch(std::span<const SinkSpec> sinks, const Payload& payload, std::ostream& out);

}  // namespace appwatch::report
