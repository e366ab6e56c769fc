#include "doctest.h"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "appwatch/arff.hpp"
#include "appwatch/error.hpp"
#include "appwatch/knn.hpp"
#include "appwatch/model.hpp"

using namespace appwatch;
using namespace appwatch::knn;

namespace {

std::vector<FeatureInstance> model_rows() {
    const auto m = model::enumerate(model::default_rules());
    std::vector<FeatureInstance> rows;
    for (std::size_t i = 0; i < m.patterns.size(); ++i)
        rows.push_back({Timestamp(static_cast<std::int64_t>(i)), AppId("normality-model"), m.patterns[i].bits,
                        m.patterns[i].label});
    return rows;
}

FeatureInstance probe(FeatureBits bits, std::string app = "x", std::int64_t t = 0) {
    return {Timestamp(t), AppId(std::move(app)), bits, FeatureClass::Unknown};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("training preconditions") {
    const auto rows = model_rows();
    CHECK(train(rows).size() == 32);
    CHECK_THROWS_AS(train(rows, {33, false}), ConfigError);
    CHECK_THROWS_AS(train(rows, {0, false}), ConfigError);
    CHECK_THROWS_AS(train(std::vector<FeatureInstance>{}), Error);
    auto unknown = rows;
    unknown[3].label = FeatureClass::Unknown;
    CHECK_THROWS_AS(train(unknown), Error);

    const std::vector<FeatureInstance> one{{Timestamp(0), AppId("a"), FeatureBits(1, 1, 1, 1, 1), FeatureClass::Malicious}};
    const auto c = train(one);
    for (unsigned code = 0; code < 32; ++code)
        CHECK(classify(c, probe(FeatureBits::from_code(code))).label == FeatureClass::Malicious);
}

TEST_CASE("distances on the feature bits") {
    const auto c = train(model_rows());
    CHECK(distance(probe(FeatureBits(0, 0, 1, 0, 0)), probe(FeatureBits(0, 0, 1, 0, 0)), c) == 0.0);
    CHECK(distance(probe(FeatureBits(0, 0, 1, 0, 0)), probe(FeatureBits(0, 0, 1, 0, 1)), c) == 1.0);
    CHECK(distance(probe(FeatureBits(0, 0, 0, 0, 0)), probe(FeatureBits(1, 1, 1, 1, 1)), c) ==
          doctest::Approx(std::sqrt(5.0)));
    CHECK(distance(probe(FeatureBits(0, 0, 0, 0, 0), "a"), probe(FeatureBits(0, 0, 0, 0, 0), "b"), c) == 0.0);

    Point missing;
    missing.bits = {false, false, std::nullopt, false, true};
    Point full = missing;
    full.bits[2] = false;
    CHECK(c.distance(missing, full) == 1.0);
}

TEST_CASE("identifiers join the distance when asked") {
    const auto c = train(model_rows(), {1, true});
    CHECK(distance(probe(FeatureBits(0, 0, 0, 0, 0), "a", 0), probe(FeatureBits(0, 0, 0, 0, 0), "b", 0), c) == 1.0);
    CHECK(distance(probe(FeatureBits(0, 0, 0, 0, 0), "a", 0), probe(FeatureBits(0, 0, 0, 0, 0), "a", 31), c) ==
          doctest::Approx(1.0));
    // Times outside the training range clamp to its ends.
    CHECK(distance(probe(FeatureBits(0, 0, 0, 0, 0), "a", 0), probe(FeatureBits(0, 0, 0, 0, 0), "a", 1000000), c) ==
          doctest::Approx(1.0));
}

TEST_CASE("every model row classifies as itself") {
    const auto rows = model_rows();
    const auto c = train(rows);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto p = classify(c, probe(rows[i].bits, "anything", 123456));
        CHECK(p.label == rows[i].label);
        CHECK(p.neighbors.front() == i);
        CHECK(p.nearest_distance == 0.0);
        CHECK(p.score() == (rows[i].label == FeatureClass::Malicious ? 1.0 : 0.0));
    }
}

TEST_CASE("distance is a metric on complete instances") {
    std::mt19937_64 gen(5);
    const auto c = train(model_rows(), {1, true});
    const std::vector<std::string> apps{"a", "b", "c", "normality-model"};
    auto random_instance = [&] {
        return probe(FeatureBits::from_code(static_cast<unsigned>(gen() % 32)), apps[gen() % apps.size()],
                     static_cast<std::int64_t>(gen() % 40));
    };
    for (int i = 0; i < 10000; ++i) {
        const auto a = random_instance();
        const auto b = random_instance();
        const auto x = random_instance();
        const double ab = distance(a, b, c);
        REQUIRE(ab >= 0.0);
        REQUIRE(distance(a, a, c) == 0.0);
        REQUIRE(ab == distance(b, a, c));
        if (a == b) REQUIRE(ab == 0.0);
        REQUIRE(ab <= distance(a, x, c) + distance(x, b, c) + 1e-12);
    }
}

TEST_CASE("voting with k > 1") {
    std::vector<FeatureInstance> rows{
        {Timestamp(0), AppId("a"), FeatureBits(0, 0, 0, 0, 0), FeatureClass::Malicious},
        {Timestamp(1), AppId("a"), FeatureBits(0, 0, 0, 0, 1), FeatureClass::Normal},
        {Timestamp(2), AppId("a"), FeatureBits(0, 0, 0, 1, 1), FeatureClass::Normal},
        {Timestamp(3), AppId("a"), FeatureBits(1, 1, 1, 1, 1), FeatureClass::Malicious},
    };
    const auto p3 = classify(train(rows, {3, false}), probe(FeatureBits(0, 0, 0, 0, 0)));
    CHECK(p3.neighbors == std::vector<std::size_t>{0, 1, 2});
    CHECK(p3.malicious_votes == 1);
    CHECK(p3.label == FeatureClass::Normal);
    CHECK(p3.score() == doctest::Approx(1.0 / 3.0));

    // An even split goes to the nearest neighbour.
    CHECK(classify(train(rows, {2, false}), probe(FeatureBits(0, 0, 0, 0, 0))).label == FeatureClass::Malicious);
    CHECK(classify(train(rows, {2, false}), probe(FeatureBits(0, 0, 0, 0, 1))).label == FeatureClass::Normal);
}

TEST_CASE("equal distances go to the lower row") {
    std::vector<FeatureInstance> rows{
        {Timestamp(0), AppId("a"), FeatureBits(0, 0, 0, 0, 1), FeatureClass::Normal},
        {Timestamp(1), AppId("a"), FeatureBits(0, 0, 0, 1, 0), FeatureClass::Malicious},
    };
    CHECK(classify(train(rows), probe(FeatureBits(0, 0, 0, 0, 0))).label == FeatureClass::Normal);
    std::swap(rows[0], rows[1]);
    CHECK(classify(train(rows), probe(FeatureBits(0, 0, 0, 0, 0))).label == FeatureClass::Malicious);
}

TEST_CASE("labelling the unclassified sample") {
    const auto c = train(model_rows());
    const auto test = arff::parse(slurp(std::string(APPWATCH_TEST_DATA) + "/fig8.arff"));
    const auto out = classify_document(c, test);
    REQUIRE(out.document.rows.size() == 38);
    REQUIRE(out.predictions.size() == 38);
    CHECK(out.document.attributes == test.attributes);
    for (std::size_t i = 0; i < 38; ++i) {
        const auto& row = out.document.rows[i];
        REQUIRE(std::holds_alternative<std::string>(row[7]));
        for (std::size_t a = 0; a < 7; ++a) CHECK(row[a] == test.rows[i][a]);
        const auto app = std::get<std::string>(row[1]);
        const auto label = std::get<std::string>(row[7]);
        if (app == "com.bbm.BbmService" || app == "com.bbm") CHECK(label == "Malicious");
        else CHECK(label == "Normal");
    }
    CHECK(arff::serialize(out.document).find(",?") == std::string::npos);
}

TEST_CASE("labelling keeps existing classes and checks the schema") {
    const auto c = train(model_rows());
    const auto labelled = arff::parse(
        "@relation t\n@attribute Time date 'MM.dd.yyyy HH:mm:ss'\n@attribute AppName string\n"
        "@attribute OutCall {0,1}\n@attribute InCall {0,1}\n@attribute OutSMS {0,1}\n@attribute InSMS {0,1}\n"
        "@attribute Screen {0,1}\n@attribute Class {Normal,Malicious}\n@data\n"
        "'10.03.2015 08:40:38',a,0,0,1,0,0,Normal\n'10.03.2015 08:40:38',a,0,0,1,0,0,?\n");
    const auto out = classify_document(c, labelled);
    CHECK(std::get<std::string>(out.document.rows[0][7]) == "Normal");
    CHECK(std::get<std::string>(out.document.rows[1][7]) == "Malicious");

    auto empty = labelled;
    empty.rows.clear();
    CHECK(classify_document(c, empty).document.rows.empty());

    auto broken = labelled;
    broken.attributes[6].name = "Display";
    CHECK_THROWS_AS(classify_document(c, broken), SchemaError);
}
