#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "appwatch/extract.hpp"
#include "appwatch/knn.hpp"

namespace appwatch::eval {

/// Exact fraction in lowest terms with a positive denominator.
struct Ratio {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Ratio make(std::int64_t num, std::int64_t den);
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator==(const Ratio&, const Ratio&) = default;
};

Ratio operator+(Ratio a, Ratio b);
Ratio operator-(Ratio a, Ratio b);
Ratio operator*(Ratio a, Ratio b);

/// nullopt when the defining denominator is zero.
using Metric = std::optional<Ratio>;

Metric ratio(std::int64_t num, std::int64_t den);

/// Rows are true classes, columns predictions; Malicious is the positive class.
struct ConfusionMatrix {
    std::int64_t nn = 0;  // Normal classified Normal
    std::int64_t nm = 0;  // Normal classified Malicious
    std::int64_t mn = 0;  // Malicious classified Normal
    std::int64_t mm = 0;  // Malicious classified Malicious

    std::int64_t total() const { return nn + nm + mn + mm; }
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Throws Error on length mismatch, empty input or an Unknown label.
ConfusionMatrix confusion(std::span<const FeatureClass> predictions, std::span<const FeatureClass> truths);

/// One row of the per-class table, treating `this` class as positive.
struct ClassMetrics {
    Metric tp_rate;
    Metric fp_rate;
    Metric precision;
    Metric recall;
    Metric f_measure;
    std::optional<double> mcc;
    std::int64_t support = 0;  // true instances of the class
};

struct EvaluationReport {
    ConfusionMatrix matrix;

    Metric accuracy;    // (nn + mm) / total
    Metric error_rate;  // (nm + mn) / total
    Metric tpr;         // mm / (mm + mn)
    Metric tnr;         // nn / (nn + nm)
    Metric fpr;         // nm / (nm + nn)
    Metric fnr;         // mn / (mm + mn)
    Metric precision;   // mm / (nm + mm)

    // Column-wise (predictive-value) ratios: the share of Normal predictions
    // that are right, and the share of Malicious predictions that are right.
    Metric sensitivity;  // nn / (nn + mn)
    Metric specificity;  // mm / (nm + mm)

    // The row-wise textbook variants, equal to tpr and tnr.
    Metric row_sensitivity;
    Metric row_specificity;

    Metric kappa;  // Cohen's kappa

    ClassMetrics normal;
    ClassMetrics malicious;
    ClassMetrics weighted;  // support-weighted average of the two rows

    std::optional<double> auc;  // filled by callers that have scores
};

/// Throws Error if the matrix is empty.
EvaluationReport metrics(const ConfusionMatrix& matrix);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

/// Threshold sweep over the distinct scores, highest first, with a score
/// counting as Malicious when >= the threshold. Starts at (0,0) and ends at
/// (1,1); tied scores move in one step. nullopt unless both classes occur.
/// Throws Error on length mismatch, Unknown truths or scores outside [0,1].
std::optional<std::vector<RocPoint>> roc_points(std::span<const double> scores,
                                                std::span<const FeatureClass> truths);

/// Trapezoidal area under the polyline.
double auc(std::span<const RocPoint> points);

std::optional<double> auc(std::span<const double> scores, std::span<const FeatureClass> truths);

/// Stratified fold assignment. Each class is shuffled with the seeded
/// generator and rows are then dealt round-robin, Normal first, with the
/// dealing position carried from one class to the next. Fold index lists
/// are ascending. Throws ConfigError("folds") unless 2 <= k <= rows.
std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const FeatureClass> labels, std::size_t k,
                                                       std::uint64_t seed);

struct CrossValidation {
    EvaluationReport report;
    std::vector<knn::Prediction> predictions;  // indexed like the input rows
    std::vector<std::size_t> fold_of;
};

/// Trains on each fold's complement (in input order), classifies the fold,
/// and pools every prediction into one confusion matrix and one ROC.
CrossValidation cross_validate(std::span<const FeatureInstance> rows, const knn::ClassifierConfig& config,
                               std::size_t k, std::uint64_t seed);

struct RunInfo {
    std::string scheme;
    std::string relation;
    std::size_t instances = 0;
    std::vector<std::string> attributes;
    std::string test_mode;
};

/// Plain-text report: run information, summary, per-class table, confusion
/// matrix, and the rate/precision/sensitivity block.
std::string render_text(const EvaluationReport& report, const RunInfo& info);

/// Machine-readable form; undefined metrics become null.
nlohmann::json to_json(const EvaluationReport& report, const RunInfo& info);

}  // namespace appwatch::eval
