#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "appwatch/arff.hpp"
#include "appwatch/extract.hpp"

namespace appwatch::knn {

struct ClassifierConfig {
    std::size_t k = 1;
    /// When set, Time (min-max normalised) and AppName (0/1 mismatch) join
    /// the distance alongside the five feature bits.
    bool include_identifiers = false;
};

/// One row as the classifier sees it. Any attribute may be missing; a
/// missing value is at maximal distance (1) from everything.
struct Point {
    std::optional<std::int64_t> time;
    std::optional<std::string> app;
    std::array<std::optional<bool>, kFeatureCount> bits;
};

Point to_point(const FeatureInstance& inst);

struct Prediction {
    FeatureClass label = FeatureClass::Normal;
    std::size_t malicious_votes = 0;
    std::size_t k = 1;
    std::vector<std::size_t> neighbors;  // training-row indices, nearest first
    double nearest_distance = 0.0;

    /// Fraction of the k neighbours labelled Malicious.
    double score() const { return static_cast<double>(malicious_votes) / static_cast<double>(k); }
};

class TrainedClassifier {
public:
    /// Keeps `rows` in order; ties between equally distant rows go to the
    /// lower index. Throws Error for an empty set or an Unknown label, and
    /// ConfigError("k") unless 1 <= k <= rows.size().
    TrainedClassifier(std::span<const FeatureInstance> rows, ClassifierConfig config);

    const ClassifierConfig& config() const noexcept { return config_; }
    std::size_t size() const noexcept { return points_.size(); }
    FeatureClass label(std::size_t row) const { return labels_.at(row); }

    /// Euclidean combination over the included attributes: nominal values
    /// add 0 when equal and 1 otherwise, Time adds its squared normalised
    /// difference, missing values add 1.
    double distance(const Point& a, const Point& b) const;

    /// k nearest rows by (distance, index). Malicious when more than half the
    /// neighbours are, or on an exact half split when the nearest one is.
    Prediction classify(const Point& p) const;

private:
    double squared_distance(const Point& a, const Point& b) const;
    double normalise_time(std::int64_t t) const;

    ClassifierConfig config_;
    std::vector<Point> points_;
    std::vector<FeatureClass> labels_;
    std::int64_t time_min_ = 0;
    std::int64_t time_max_ = 0;
};

TrainedClassifier train(std::span<const FeatureInstance> rows, ClassifierConfig config = {});

double distance(const FeatureInstance& a, const FeatureInstance& b, const TrainedClassifier& classifier);

Prediction classify(const TrainedClassifier& classifier, const FeatureInstance& instance);

struct LabeledDocument {
    arff::Document document;
    std::vector<Prediction> predictions;  // one per row
};

/// Fills every missing Class value with the predicted label; all other
/// values are copied unchanged. Throws SchemaError naming the first
/// attribute where `test` departs from the feature schema.
LabeledDocument classify_document(const TrainedClassifier& classifier, const arff::Document& test);

/// Converts a document row (feature schema assumed) into a Point.
Point point_from_row(const arff::Row& row);

}  // namespace appwatch::knn
