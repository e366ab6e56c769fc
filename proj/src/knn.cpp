#include "appwatch/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "appwatch/error.hpp"

namespace appwatch::knn {

Point to_point(const FeatureInstance& inst) {
    Point p;
    p.time = inst.time.seconds();
    p.app = inst.app.name();
    for (auto f : kAllFeatures) p.bits[static_cast<std::size_t>(f)] = inst.bits.get(f);
    return p;
}

Point point_from_row(const arff::Row& row) {
    Point p;
    if (const auto* t = std::get_if<Timestamp>(&row.at(0))) p.time = t->seconds();
    if (const auto* a = std::get_if<std::string>(&row.at(1))) p.app = *a;
    for (std::size_t i = 0; i < kFeatureCount; ++i)
        if (const auto* b = std::get_if<std::string>(&row.at(2 + i))) p.bits[i] = *b == "1";
    return p;
}

TrainedClassifier::TrainedClassifier(std::span<const FeatureInstance> rows, ClassifierConfig config)
    : config_(config) {
    if (rows.empty()) throw Error("training set is empty");
    if (config.k == 0 || config.k > rows.size())
        throw ConfigError("k", fmt::format("must be between 1 and the training-set size {}, got {}", rows.size(),
                                           config.k));
    points_.reserve(rows.size());
    labels_.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].label == FeatureClass::Unknown)
            throw Error(fmt::format("training row {} has no class label", i + 1));
        points_.push_back(to_point(rows[i]));
        labels_.push_back(rows[i].label);
    }
    const auto [lo, hi] = std::minmax_element(rows.begin(), rows.end(),
                                              [](const auto& a, const auto& b) { return a.time < b.time; });
    time_min_ = lo->time.seconds();
    time_max_ = hi->time.seconds();
}

double TrainedClassifier::normalise_time(std::int64_t t) const {
    if (time_max_ == time_min_) return 0.0;
    const double v = static_cast<double>(t - time_min_) / static_cast<double>(time_max_ - time_min_);
    return std::clamp(v, 0.0, 1.0);
}

double TrainedClassifier::squared_distance(const Point& a, const Point& b) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        if (!a.bits[i] || !b.bits[i] || *a.bits[i] != *b.bits[i]) sum += 1.0;
    }
    if (config_.include_identifiers) {
        if (!a.app || !b.app || *a.app != *b.app) sum += 1.0;
        if (!a.time || !b.time) {
            sum += 1.0;
        } else {
            const double d = normalise_time(*a.time) - normalise_time(*b.time);
            sum += d * d;
        }
    }
    return sum;
}

double TrainedClassifier::distance(const Point& a, const Point& b) const { return std::sqrt(squared_distance(a, b)); }

Prediction TrainedClassifier::classify(const Point& p) const {
    std::vector<double> d(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) d[i] = squared_distance(p, points_[i]);
    std::vector<std::size_t> order(points_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto k = config_.k;
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t x, std::size_t y) { return d[x] != d[y] ? d[x] < d[y] : x < y; });

    Prediction pred;
    pred.k = k;
    pred.neighbors.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    pred.nearest_distance = std::sqrt(d[pred.neighbors.front()]);
    for (auto idx : pred.neighbors)
        if (labels_[idx] == FeatureClass::Malicious) ++pred.malicious_votes;
    const bool majority = 2 * pred.malicious_votes > k;
    const bool split_to_nearest =
        2 * pred.malicious_votes == k && labels_[pred.neighbors.front()] == FeatureClass::Malicious;
    pred.label = majority || split_to_nearest ? FeatureClass::Malicious : FeatureClass::Normal;
    return pred;
}

TrainedClassifier train(std::span<const FeatureInstance> rows, ClassifierConfig config) {
    return TrainedClassifier(rows, config);
}

double distance(const FeatureInstance& a, const FeatureInstance& b, const TrainedClassifier& classifier) {
    return classifier.distance(to_point(a), to_point(b));
}

Prediction classify(const TrainedClassifier& classifier, const FeatureInstance& instance) {
    return classifier.classify(to_point(instance));
}

LabeledDocument classify_document(const TrainedClassifier& classifier, const arff::Document& test) {
    check_feature_schema(test);
    LabeledDocument out{test, {}};
    out.predictions.reserve(test.rows.size());
    for (auto& row : out.document.rows) {
        auto pred = classifier.classify(point_from_row(row));
        if (std::holds_alternative<arff::Missing>(row[7])) row[7] = std::string(to_string(pred.label));
        out.predictions.push_back(std::move(pred));
    }
    return out;
}

}  // namespace appwatch::knn
