#include "appwatch/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "appwatch/error.hpp"
#include "appwatch/rng.hpp"

namespace appwatch::eval {

namespace {

std::optional<double> mcc_of(const ConfusionMatrix& m) {
    const double den = static_cast<double>(m.nn + m.nm) * static_cast<double>(m.nn + m.mn) *
                       static_cast<double>(m.mm + m.nm) * static_cast<double>(m.mm + m.mn);
    if (den == 0.0) return std::nullopt;
    return (static_cast<double>(m.nn) * static_cast<double>(m.mm) -
            static_cast<double>(m.nm) * static_cast<double>(m.mn)) /
           std::sqrt(den);
}

/// Per-class row with `tp/fn/fp/tn` seen from that class as positive.
ClassMetrics class_row(std::int64_t tp, std::int64_t fn, std::int64_t fp, std::int64_t tn, std::optional<double> mcc) {
    ClassMetrics c;
    c.tp_rate = ratio(tp, tp + fn);
    c.fp_rate = ratio(fp, fp + tn);
    c.precision = ratio(tp, tp + fp);
    c.recall = c.tp_rate;
    c.f_measure = ratio(2 * tp, 2 * tp + fp + fn);
    c.mcc = mcc;
    c.support = tp + fn;
    return c;
}

Metric weighted(const Metric& a, std::int64_t wa, const Metric& b, std::int64_t wb) {
    if ((wa > 0 && !a) || (wb > 0 && !b)) return std::nullopt;
    Ratio sum;
    if (wa > 0) sum = sum + Ratio::make(wa, 1) * *a;
    if (wb > 0) sum = sum + Ratio::make(wb, 1) * *b;
    return sum * Ratio::make(1, wa + wb);
}

std::string fixed(const Metric& m, int places) { return m ? fmt::format("{:.{}f}", m->value(), places) : "?"; }
std::string fixed(const std::optional<double>& v, int places) { return v ? fmt::format("{:.{}f}", *v, places) : "?"; }

nlohmann::json metric_json(const Metric& m) {
    if (!m) return nullptr;
    return {{"num", m->num}, {"den", m->den}, {"value", m->value()}};
}

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

nlohmann::json class_json(const ClassMetrics& c) {
    return {{"tp_rate", metric_json(c.tp_rate)},     {"fp_rate", metric_json(c.fp_rate)},
            {"precision", metric_json(c.precision)}, {"recall", metric_json(c.recall)},
            {"f_measure", metric_json(c.f_measure)}, {"mcc", opt_json(c.mcc)},
            {"support", c.support}};
}

}  // namespace

Ratio Ratio::make(std::int64_t num, std::int64_t den) {
    if (den == 0) throw Error(fmt::format("invalid ratio {}/0", num));
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const auto g = std::gcd(num, den);
    return {num / g, den / g};
}

Ratio operator+(Ratio a, Ratio b) { return Ratio::make(a.num * b.den + b.num * a.den, a.den * b.den); }
Ratio operator-(Ratio a, Ratio b) { return Ratio::make(a.num * b.den - b.num * a.den, a.den * b.den); }
Ratio operator*(Ratio a, Ratio b) { return Ratio::make(a.num * b.num, a.den * b.den); }

Metric ratio(std::int64_t num, std::int64_t den) {
    if (den == 0) return std::nullopt;
    return Ratio::make(num, den);
}

ConfusionMatrix confusion(std::span<const FeatureClass> predictions, std::span<const FeatureClass> truths) {
    if (predictions.size() != truths.size())
        throw Error(fmt::format("{} predictions for {} truths", predictions.size(), truths.size()));
    if (predictions.empty()) throw Error("no predictions to score");
    ConfusionMatrix m;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const auto p = predictions[i];
        const auto t = truths[i];
        if (p == FeatureClass::Unknown || t == FeatureClass::Unknown)
            throw Error(fmt::format("row {} has an unknown label", i + 1));
        if (t == FeatureClass::Normal)
            ++(p == FeatureClass::Normal ? m.nn : m.nm);
        else
            ++(p == FeatureClass::Normal ? m.mn : m.mm);
    }
    return m;
}

EvaluationReport metrics(const ConfusionMatrix& m) {
    const auto n = m.total();
    if (n <= 0) throw Error("confusion matrix is empty");
    EvaluationReport r;
    r.matrix = m;
    r.accuracy = ratio(m.nn + m.mm, n);
    r.error_rate = ratio(m.nm + m.mn, n);
    r.tpr = ratio(m.mm, m.mm + m.mn);
    r.tnr = ratio(m.nn, m.nn + m.nm);
    r.fpr = ratio(m.nm, m.nm + m.nn);
    r.fnr = ratio(m.mn, m.mm + m.mn);
    r.precision = ratio(m.mm, m.nm + m.mm);
    r.sensitivity = ratio(m.nn, m.nn + m.mn);
    r.specificity = ratio(m.mm, m.nm + m.mm);
    r.row_sensitivity = r.tpr;
    r.row_specificity = r.tnr;

    // kappa = (N * agree - S) / (N^2 - S), S = sum of row total x column total.
    const std::int64_t chance = (m.nn + m.nm) * (m.nn + m.mn) + (m.mn + m.mm) * (m.nm + m.mm);
    const std::int64_t kappa_num = n * (m.nn + m.mm) - chance;
    const std::int64_t kappa_den = n * n - chance;
    r.kappa = ratio(kappa_num, kappa_den);
    const auto mcc = mcc_of(m);
    r.normal = class_row(m.nn, m.nm, m.mn, m.mm, mcc);
    r.malicious = class_row(m.mm, m.mn, m.nm, m.nn, mcc);

    const auto wn = r.normal.support;
    const auto wm = r.malicious.support;
    r.weighted.tp_rate = weighted(r.normal.tp_rate, wn, r.malicious.tp_rate, wm);
    r.weighted.fp_rate = weighted(r.normal.fp_rate, wn, r.malicious.fp_rate, wm);
    r.weighted.precision = weighted(r.normal.precision, wn, r.malicious.precision, wm);
    r.weighted.recall = weighted(r.normal.recall, wn, r.malicious.recall, wm);
    r.weighted.f_measure = weighted(r.normal.f_measure, wn, r.malicious.f_measure, wm);
    r.weighted.mcc = mcc;
    r.weighted.support = wn + wm;
    return r;
}

std::optional<std::vector<RocPoint>> roc_points(std::span<const double> scores, std::span<const FeatureClass> truths) {
    if (scores.size() != truths.size())
        throw Error(fmt::format("{} scores for {} truths", scores.size(), truths.size()));
    std::int64_t pos = 0;
    std::int64_t neg = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!(scores[i] >= 0.0 && scores[i] <= 1.0)) throw Error(fmt::format("score {} outside [0,1]", scores[i]));
        if (truths[i] == FeatureClass::Unknown) throw Error(fmt::format("row {} has an unknown label", i + 1));
        ++(truths[i] == FeatureClass::Malicious ? pos : neg);
    }
    if (pos == 0 || neg == 0) return std::nullopt;

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    std::vector<RocPoint> points{{0.0, 0.0}};
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    for (std::size_t i = 0; i < order.size();) {
        const double threshold = scores[order[i]];
        while (i < order.size() && scores[order[i]] == threshold) {
            ++(truths[order[i]] == FeatureClass::Malicious ? tp : fp);
            ++i;
        }
        points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                          static_cast<double>(tp) / static_cast<double>(pos)});
    }
    return points;
}

double auc(std::span<const RocPoint> points) {
    double area = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
        area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) / 2.0;
    return area;
}

std::optional<double> auc(std::span<const double> scores, std::span<const FeatureClass> truths) {
    const auto points = roc_points(scores, truths);
    if (!points) return std::nullopt;
    return auc(*points);
}

std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const FeatureClass> labels, std::size_t k,
                                                       std::uint64_t seed) {
    if (k < 2) throw ConfigError("folds", fmt::format("need at least 2 folds, got {}", k));
    if (k > labels.size())
        throw ConfigError("folds", fmt::format("{} folds for only {} rows", k, labels.size()));

    Xorshift64Star rng(seed);
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t deal = 0;
    for (auto cls : {FeatureClass::Normal, FeatureClass::Malicious}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == FeatureClass::Unknown) throw Error(fmt::format("row {} has an unknown label", i + 1));
            if (labels[i] == cls) members.push_back(i);
        }
        for (std::size_t i = members.size(); i > 1; --i) std::swap(members[i - 1], members[rng.below(i)]);
        for (auto idx : members) folds[deal++ % k].push_back(idx);
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

CrossValidation cross_validate(std::span<const FeatureInstance> rows, const knn::ClassifierConfig& config,
                               std::size_t k, std::uint64_t seed) {
    std::vector<FeatureClass> truths;
    truths.reserve(rows.size());
    for (const auto& r : rows) truths.push_back(r.label);
    const auto folds = stratified_kfold(truths, k, seed);

    CrossValidation cv;
    cv.predictions.resize(rows.size());
    cv.fold_of.resize(rows.size());
    std::vector<char> in_fold(rows.size());
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::fill(in_fold.begin(), in_fold.end(), 0);
        for (auto i : folds[f]) in_fold[i] = 1;
        std::vector<FeatureInstance> train_rows;
        train_rows.reserve(rows.size() - folds[f].size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (!in_fold[i]) train_rows.push_back(rows[i]);
        const knn::TrainedClassifier clf(train_rows, config);
        for (auto i : folds[f]) {
            cv.predictions[i] = clf.classify(knn::to_point(rows[i]));
            cv.fold_of[i] = f;
        }
    }

    std::vector<FeatureClass> predicted;
    std::vector<double> scores;
    for (const auto& p : cv.predictions) {
        predicted.push_back(p.label);
        scores.push_back(p.score());
    }
    cv.report = metrics(confusion(predicted, truths));
    cv.report.auc = auc(scores, truths);
    return cv;
}

std::string render_text(const EvaluationReport& r, const RunInfo& info) {
    const auto& m = r.matrix;
    std::string out;
    out += "=== Run information ===\n\n";
    out += fmt::format("Scheme:       {}\n", info.scheme);
    out += fmt::format("Relation:     {}\n", info.relation);
    out += fmt::format("Instances:    {}\n", info.instances);
    out += fmt::format("Attributes:   {}\n", info.attributes.size());
    for (const auto& a : info.attributes) out += fmt::format("              {}\n", a);
    out += fmt::format("Test mode:    {}\n\n", info.test_mode);

    out += "=== Stratified cross-validation ===\n=== Summary ===\n\n";
    const auto correct = m.nn + m.mm;
    const auto wrong = m.nm + m.mn;
    out += fmt::format("Correctly Classified Instances    {:>6}    {:>9} %\n", correct,
                       r.accuracy ? fmt::format("{:.4f}", 100.0 * r.accuracy->value()) : "?");
    out += fmt::format("Incorrectly Classified Instances  {:>6}    {:>9} %\n", wrong,
                       r.error_rate ? fmt::format("{:.4f}", 100.0 * r.error_rate->value()) : "?");
    out += fmt::format("Kappa statistic                   {:>6}\n", fixed(r.kappa, 4));
    out += fmt::format("Total Number of Instances         {:>6}\n\n", m.total());

    out += "=== Detailed Accuracy By Class ===\n\n";
    out += fmt::format("{:<15}{:<9}{:<9}{:<11}{:<9}{:<11}{:<9}{:<10}{}\n", "", "TP Rate", "FP Rate", "Precision",
                       "Recall", "F-Measure", "MCC", "ROC Area", "Class");
    auto row = [&](std::string_view label, const ClassMetrics& c, std::string_view cls) {
        out += fmt::format("{:<15}{:<9}{:<9}{:<11}{:<9}{:<11}{:<9}{:<10}{}", label, fixed(c.tp_rate, 3),
                           fixed(c.fp_rate, 3), fixed(c.precision, 3), fixed(c.recall, 3), fixed(c.f_measure, 3),
                           fixed(c.mcc, 3), fixed(r.auc, 3), cls);
        while (!out.empty() && out.back() == ' ') out.pop_back();
        out += '\n';
    };
    row("", r.normal, "Normal");
    row("", r.malicious, "Malicious");
    row("Weighted Avg.", r.weighted, "");
    out += "\n=== Confusion Matrix ===\n\n";
    const auto width = std::max<std::size_t>(
        {fmt::format("{}", std::max({m.nn, m.nm, m.mn, m.mm})).size(), std::size_t{2}});
    out += fmt::format("{:>{}} {:>{}}   <-- classified as\n", "a", width + 1, "b", width);
    out += fmt::format("{:>{}} {:>{}} |  a = Normal\n", m.nn, width + 1, m.nm, width);
    out += fmt::format("{:>{}} {:>{}} |  b = Malicious\n\n", m.mn, width + 1, m.mm, width);

    out += "=== Detection Measures (Malicious = positive) ===\n\n";
    auto line = [&](std::string_view name, const std::string& value) {
        out += fmt::format("{:<38}{}\n", name, value);
    };
    line("Accuracy", fixed(r.accuracy, 4));
    line("Error rate", fixed(r.error_rate, 4));
    line("True positive rate (TPR)", fixed(r.tpr, 4));
    line("True negative rate (TNR)", fixed(r.tnr, 4));
    line("False positive rate (FPR)", fixed(r.fpr, 4));
    line("False negative rate (FNR)", fixed(r.fnr, 4));
    line("Precision", fixed(r.precision, 4));
    line("Sensitivity (Normal predictive)", fixed(r.sensitivity, 4));
    line("Specificity (Malicious predictive)", fixed(r.specificity, 4));
    line("Sensitivity (row-wise)", fixed(r.row_sensitivity, 4));
    line("Specificity (row-wise)", fixed(r.row_specificity, 4));
    line("AUC", fixed(r.auc, 4));
    return out;
}

nlohmann::json to_json(const EvaluationReport& r, const RunInfo& info) {
    const auto& m = r.matrix;
    return {
        {"run",
         {{"scheme", info.scheme},
          {"relation", info.relation},
          {"instances", info.instances},
          {"attributes", info.attributes},
          {"test_mode", info.test_mode}}},
        {"confusion_matrix", {{"nn", m.nn}, {"nm", m.nm}, {"mn", m.mn}, {"mm", m.mm}}},
        {"accuracy", metric_json(r.accuracy)},
        {"error_rate", metric_json(r.error_rate)},
        {"tpr", metric_json(r.tpr)},
        {"tnr", metric_json(r.tnr)},
        {"fpr", metric_json(r.fpr)},
        {"fnr", metric_json(r.fnr)},
        {"precision", metric_json(r.precision)},
        {"sensitivity", metric_json(r.sensitivity)},
        {"specificity", metric_json(r.specificity)},
        {"row_sensitivity", metric_json(r.row_sensitivity)},
        {"row_specificity", metric_json(r.row_specificity)},
        {"kappa", metric_json(r.kappa)},
        {"auc", opt_json(r.auc)},
        {"per_class", {{"Normal", class_json(r.normal)}, {"Malicious", class_json(r.malicious)}}},
        {"weighted_avg", class_json(r.weighted)},
    };
}

}  // namespace appwatch::eval
