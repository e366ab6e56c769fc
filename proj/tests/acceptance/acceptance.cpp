// Acceptance checks, one PASS/FAIL line per criterion.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "appwatch/arff.hpp"
#include "appwatch/cli.hpp"
#include "appwatch/eval.hpp"
#include "appwatch/extract.hpp"
#include "appwatch/knn.hpp"
#include "appwatch/model.hpp"
#include "appwatch/simulate.hpp"
#include "appwatch/config.hpp"
#include "support/arff_gen.hpp"
#include "support/oracles.hpp"

using namespace appwatch;

namespace {

const std::string kData = APPWATCH_TEST_DATA;
const std::string kGolden = APPWATCH_GOLDEN;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Collects failed expectations for one criterion.
struct Check {
    std::vector<std::string> failures;
    void expect(bool ok, std::string what) {
        if (!ok) failures.push_back(std::move(what));
    }
    void near(double got, double want, double tol, const std::string& what) {
        expect(std::abs(got - want) <= tol, fmt::format("{}: got {:.6f}, want {} +/- {}", what, got, want, tol));
    }
};

double value(const eval::Metric& m) { return m ? m->value() : std::nan(""); }

std::vector<FeatureInstance> model_rows() {
    const auto m = model::enumerate(model::default_rules());
    std::vector<FeatureInstance> rows;
    for (std::size_t i = 0; i < m.patterns.size(); ++i)
        rows.push_back({Timestamp(static_cast<std::int64_t>(i)), AppId("normality-model"), m.patterns[i].bits,
                        m.patterns[i].label});
    return rows;
}

void metric_oracle(Check& c) {
    const auto r = eval::metrics({19, 0, 2, 11});
    constexpr double tol = 0.0005;
    c.near(value(r.accuracy), 0.9375, tol, "accuracy");
    c.near(value(r.error_rate), 0.0625, tol, "error rate");
    c.near(value(r.normal.tp_rate), 1.000, tol, "TP rate Normal");
    c.near(value(r.malicious.tp_rate), 0.846, tol, "TP rate Malicious");
    c.near(value(r.malicious.recall), 0.846, tol, "recall Malicious");
    c.near(value(r.normal.fp_rate), 0.154, tol, "FP rate Normal");
    c.near(value(r.malicious.fp_rate), 0.000, tol, "FP rate Malicious");
    c.near(value(r.normal.precision), 0.905, tol, "precision Normal");
    c.near(value(r.malicious.precision), 1.000, tol, "precision Malicious");
    c.near(value(r.normal.f_measure), 0.950, tol, "F-measure Normal");
    c.near(value(r.malicious.f_measure), 0.917, tol, "F-measure Malicious");
    c.near(value(r.weighted.precision), 0.943, tol, "weighted precision");
    c.near(value(r.kappa), 0.8672, tol, "kappa");
    c.near(value(r.sensitivity), 0.9048, tol, "sensitivity");
    c.near(value(r.specificity), 1.000, tol, "specificity");
}

void model_pinning(Check& c) {
    const auto m = model::enumerate(model::default_rules());
    c.expect(m.patterns.size() == 32, "32 patterns");
    c.expect(m.count(FeatureClass::Normal) == 13, fmt::format("{} Normal", m.count(FeatureClass::Normal)));
    c.expect(m.count(FeatureClass::Malicious) == 19, fmt::format("{} Malicious", m.count(FeatureClass::Malicious)));
    c.expect(m.patterns[FeatureBits(0, 0, 1, 0, 0).code()].label == FeatureClass::Malicious, "(0,0,1,0,0)");
    c.expect(m.patterns[FeatureBits(0, 0, 1, 0, 1).code()].label == FeatureClass::Normal, "(0,0,1,0,1)");
    for (const auto& p : m.patterns) {
        const bool bad =
            oracle::malicious(p.bits.out_call(), p.bits.in_call(), p.bits.out_sms(), p.bits.in_sms(), p.bits.screen());
        c.expect(p.label == (bad ? FeatureClass::Malicious : FeatureClass::Normal), "label of " + p.bits.to_string());
    }
}

void arff_conformance(Check& c) {
    const auto doc = arff::parse(slurp(kData + "/fig8.arff"));
    c.expect(doc.attributes.size() == 8, fmt::format("{} attributes", doc.attributes.size()));
    c.expect(doc.rows.size() == 38, fmt::format("{} rows", doc.rows.size()));
    for (const auto& row : doc.rows)
        c.expect(row.size() == 8 && std::holds_alternative<arff::Missing>(row[7]), "Class not missing");
    c.expect(arff::parse(arff::serialize(doc)) == doc, "sample round-trip");

    std::mt19937_64 gen(2015);
    int bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto d = testgen::random_document(gen);
        try {
            if (arff::parse(arff::serialize(d)) != d) ++bad;
        } catch (const std::exception&) {
            ++bad;
        }
    }
    c.expect(bad == 0, fmt::format("{} of 1000 random documents failed to round-trip", bad));
}

void classifier_properties(Check& c) {
    const auto rows = model_rows();
    const auto clf = knn::train(rows);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto p = knn::classify(clf, rows[i]);
        c.expect(p.label == rows[i].label && p.nearest_distance == 0.0, "self-classification of row " + std::to_string(i));
    }

    std::mt19937_64 gen(404);
    const auto with_ids = knn::train(rows, {1, true});
    const std::vector<std::string> apps{"a", "b", "normality-model"};
    auto random_instance = [&] {
        return FeatureInstance{Timestamp(static_cast<std::int64_t>(gen() % 40)), AppId(apps[gen() % apps.size()]),
                               FeatureBits::from_code(static_cast<unsigned>(gen() % 32)), FeatureClass::Unknown};
    };
    int broken = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto a = random_instance(), b = random_instance(), x = random_instance();
        for (const auto* k : {&clf, &with_ids}) {
            const double ab = knn::distance(a, b, *k);
            const bool ok = ab >= 0 && knn::distance(a, a, *k) == 0 && ab == knn::distance(b, a, *k) &&
                            ab <= knn::distance(a, x, *k) + knn::distance(x, b, *k) + 1e-12;
            broken += ok ? 0 : 1;
        }
    }
    c.expect(broken == 0, fmt::format("{} metric axiom violations", broken));

    std::vector<unsigned> codes;
    std::vector<bool> bad;
    for (const auto& r : rows) {
        codes.push_back(r.bits.code());
        bad.push_back(r.label == FeatureClass::Malicious);
    }
    const auto want = oracle::leave_one_out(codes, bad);
    const auto got = eval::cross_validate(rows, {1, false}, rows.size(), 1).report.matrix;
    c.expect(got == eval::ConfusionMatrix{want.nn, want.nm, want.mn, want.mm},
             fmt::format("leave-one-out ({},{},{},{}) vs oracle ({},{},{},{})", got.nn, got.nm, got.mn, got.mm, want.nn,
                         want.nm, want.mn, want.mm));
}

void cross_validation(Check& c) {
    const auto rows = model_rows();
    std::vector<FeatureClass> labels;
    for (const auto& r : rows) labels.push_back(r.label);

    const auto folds = eval::stratified_kfold(labels, 10, 1);
    c.expect(folds == eval::stratified_kfold(labels, 10, 1), "fold assignment not deterministic");
    for (std::size_t f = 0; f < folds.size(); ++f) {
        const auto bad = std::count_if(folds[f].begin(), folds[f].end(),
                                       [&](std::size_t i) { return labels[i] == FeatureClass::Malicious; });
        c.expect(folds[f].size() == 3 || folds[f].size() == 4, fmt::format("fold {} has {} rows", f, folds[f].size()));
        c.expect(bad == 1 || bad == 2, fmt::format("fold {} has {} Malicious rows", f, bad));
    }

    // Pooled matrix recomputed fold by fold with the Hamming oracle.
    oracle::Confusion want;
    for (const auto& fold : folds) {
        for (auto i : fold) {
            int best = 99;
            std::size_t best_j = 0;
            for (std::size_t j = 0; j < rows.size(); ++j) {
                if (std::find(fold.begin(), fold.end(), j) != fold.end()) continue;
                const int d = __builtin_popcount(rows[i].bits.code() ^ rows[j].bits.code());
                if (d < best) best = d, best_j = j;
            }
            const bool truth = labels[i] == FeatureClass::Malicious;
            const bool predicted = labels[best_j] == FeatureClass::Malicious;
            if (!truth) (predicted ? want.nm : want.nn)++;
            else (predicted ? want.mm : want.mn)++;
        }
    }
    const auto cv = eval::cross_validate(rows, {1, false}, 10, 1);
    c.expect(cv.report.matrix == eval::ConfusionMatrix{want.nn, want.nm, want.mn, want.mm}, "pooled matrix vs oracle");
    c.expect(cv.report.matrix == eval::cross_validate(rows, {1, false}, 10, 1).report.matrix, "cv not deterministic");

    const auto dir = std::filesystem::temp_directory_path() / "appwatch_acceptance_cv";
    std::filesystem::create_directories(dir);
    const auto train = (dir / "train.arff").string();
    std::ostringstream out, err;
    c.expect(cli::run({"gen-model", "-o", train}, out, err) == 0, "gen-model: " + err.str());
    std::ostringstream text;
    c.expect(cli::run({"--seed", "1", "evaluate", "--train", train, "--folds", "10"}, text, err) == 0,
             "evaluate: " + err.str());
    std::filesystem::remove_all(dir);
    const auto golden = slurp(kGolden + "/evaluate_folds10_seed1.txt");
    c.expect(text.str() == golden, "evaluate output differs from the golden file");
}

struct PipelineResult {
    std::vector<FeatureInstance> instances;
    std::vector<FeatureClass> predicted;
};

PipelineResult run_pipeline(const simulate::Scenario& scenario) {
    const auto trace = read_trace(write_trace(simulate::generate(scenario)));
    const auto test = arff::parse(arff::serialize(to_arff(extract(trace, 60))));
    const auto train_doc =
        arff::parse(arff::serialize(model::to_training_arff(model::enumerate(model::default_rules()),
                                                            AppId("normality-model"), Timestamp(0))));
    const auto clf = knn::train(from_arff(train_doc));
    const auto labeled = knn::classify_document(clf, test);
    PipelineResult r;
    r.instances = from_arff(labeled.document);
    for (const auto& i : r.instances) r.predicted.push_back(i.label);
    return r;
}

void end_to_end(Check& c) {
    const auto scenario = config::scenario_from(config::parse(slurp(kData + "/sendsms.scenario")));
    const AppId injected = scenario.injections.at(0).app;
    const auto r = run_pipeline(scenario);
    std::size_t mine = 0, idle_sms = 0, caught = 0, others_flagged = 0;
    for (const auto& inst : r.instances) {
        if (inst.app != injected) {
            others_flagged += inst.label == FeatureClass::Malicious;
            continue;
        }
        ++mine;
        if (inst.bits.out_sms() && !inst.bits.screen()) {
            ++idle_sms;
            caught += inst.label == FeatureClass::Malicious;
        }
    }
    c.expect(mine >= 10, fmt::format("{} instances for the injected app", mine));
    c.expect(idle_sms >= 10, fmt::format("{} screen-off OutSMS instances", idle_sms));
    c.expect(caught == idle_sms, fmt::format("{} of {} screen-off OutSMS instances Malicious", caught, idle_sms));
    c.expect(others_flagged == 0, fmt::format("{} benign-app instances flagged", others_flagged));

    auto benign = config::scenario_from(config::parse(slurp(kData + "/benign.scenario")));
    const auto first_seed = benign.seed;
    for (std::uint64_t seed = first_seed; seed < first_seed + 20; ++seed) {
        benign.seed = seed;
        const auto b = run_pipeline(benign);
        const auto flagged = std::count(b.predicted.begin(), b.predicted.end(), FeatureClass::Malicious);
        c.expect(!b.instances.empty(), "benign scenario produced no instances");
        c.expect(flagged == 0, fmt::format("benign seed {}: {} Malicious", seed, flagged));
    }
}

void auc_properties(Check& c) {
    using FC = FeatureClass;
    const std::vector<FC> truth{FC::Malicious, FC::Normal, FC::Malicious, FC::Normal};
    c.near(eval::auc(std::vector<double>{1.0, 0.0, 0.9, 0.1}, truth).value_or(-1), 1.0, 1e-12, "perfect ranking");
    c.near(eval::auc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, truth).value_or(-1), 0.5, 1e-12, "constant scores");
    c.near(eval::auc(std::vector<double>{0.9, 0.8, 0.4, 0.3}, truth).value_or(-1), 0.75, 1e-12, "hand case");

    std::mt19937_64 gen(11);
    int broken = 0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> scores;
        std::vector<FC> t;
        const int n = 4 + static_cast<int>(gen() % 40);
        for (int j = 0; j < n; ++j) {
            scores.push_back(static_cast<double>(j) / n);
            t.push_back(j % 2 ? FC::Malicious : FC::Normal);
        }
        std::shuffle(scores.begin(), scores.end(), gen);
        std::vector<double> reversed;
        for (double s : scores) reversed.push_back(1.0 - s);
        const double a = *eval::auc(scores, t), b = *eval::auc(reversed, t);
        broken += std::abs(a + b - 1.0) > 1e-9 ? 1 : 0;
    }
    c.expect(broken == 0, fmt::format("{} reversal identity violations", broken));
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
        {"metric values for the published confusion matrix", metric_oracle},
        {"normality model enumeration", model_pinning},
        {"ARFF conformance and round-trip", arff_conformance},
        {"classifier properties and leave-one-out oracle", classifier_properties},
        {"stratified cross-validation and golden output", cross_validation},
        {"end-to-end detection of SMS sent while idle", end_to_end},
        {"ROC area properties", auc_properties},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        try {
            criteria[i].second(c);
        } catch (const std::exception& e) {
            c.failures.push_back(std::string("exception: ") + e.what());
        }
        std::cout << fmt::format("{} criterion {}: {}\n", c.failures.empty() ? "PASS" : "FAIL", i + 1, criteria[i].first);
        for (const auto& f : c.failures) std::cout << "    " << f << "\n";
        std::cout.flush();
        failed += c.failures.empty() ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
