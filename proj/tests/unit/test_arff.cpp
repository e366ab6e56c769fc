#include "doctest.h"

#include <fstream>
#include <random>
#include <sstream>

#include "appwatch/arff.hpp"
#include "appwatch/error.hpp"
#include "support/arff_gen.hpp"

using namespace appwatch;
using namespace appwatch::arff;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

ParseError::Kind kind_of(std::string_view text, std::size_t* line = nullptr) {
    try {
        (void)parse(text);
    } catch (const ParseError& e) {
        if (line) *line = e.line();
        return e.kind();
    }
    FAIL("expected a parse error");
    return ParseError::Kind::Syntax;
}

}  // namespace

TEST_CASE("unclassified sample parses") {
    const auto doc = parse(slurp(std::string(APPWATCH_TEST_DATA) + "/fig8.arff"));
    CHECK(doc.relation == "AppFeatureVectors");
    REQUIRE(doc.attributes.size() == 8);
    CHECK(doc.rows.size() == 38);
    const auto& apps = std::get<Nominal>(doc.attributes[1].type).values;
    CHECK(apps.size() == 40);
    CHECK(apps[0] == "File Manager");
    CHECK(apps[1] == "Android System");
    CHECK(std::get<Date>(doc.attributes[0].type).pattern == "MM.dd.yyyy HH:mm:ss");
    CHECK(std::get<Nominal>(doc.attributes[7].type).values == std::vector<std::string>{"Normal", "Malicious"});
    for (const auto& row : doc.rows) CHECK(std::holds_alternative<Missing>(row[7]));
    CHECK(std::get<Timestamp>(doc.rows[0][0]).seconds() == 1443861638);
    CHECK(std::get<std::string>(doc.rows[24][1]) == "com.bbm.BbmService");
    CHECK(parse(serialize(doc)) == doc);
    CHECK(serialize(parse(serialize(doc))) == serialize(doc));
}

TEST_CASE("minimal file") {
    const auto doc = parse("@relation r\n@attribute x numeric\n@data\n1.5\n");
    REQUIRE(doc.rows.size() == 1);
    CHECK(std::get<double>(doc.rows[0][0]) == 1.5);
}

TEST_CASE("case, comments and quoting") {
    const auto doc = parse(
        "% comment\n@RELATION 'my rel'\n\n@Attribute \"a b\" {x,'y z',\"q\"\"r\"}\n@attribute s STRING\n"
        "@attribute n REAL\n@DATA\n% inside data\n'y z', 'it''s', 2\n\"q\"\"r\",plain words,?\n");
    CHECK(doc.relation == "my rel");
    CHECK(doc.attributes[0].name == "a b");
    CHECK(std::get<Nominal>(doc.attributes[0].type).values == std::vector<std::string>{"x", "y z", "q\"r"});
    REQUIRE(doc.rows.size() == 2);
    CHECK(std::get<std::string>(doc.rows[0][1]) == "it's");
    CHECK(std::get<std::string>(doc.rows[1][0]) == "q\"r");
    CHECK(std::get<std::string>(doc.rows[1][1]) == "plain words");
    CHECK(std::holds_alternative<Missing>(doc.rows[1][2]));
}

TEST_CASE("parse errors carry kind and line") {
    std::size_t line = 0;
    CHECK(kind_of("@relation r\n@attribute b {0,1}\n@data\n2\n", &line) == ParseError::Kind::UnknownNominal);
    CHECK(line == 4);
    CHECK(kind_of("@relation r\n@attribute b {0,1}\n@data\n0,1\n", &line) == ParseError::Kind::Arity);
    CHECK(line == 4);
    CHECK(kind_of("@relation r\n@attribute t date 'MM.dd.yyyy'\n@data\n'02.30.2015'\n", &line) ==
          ParseError::Kind::Date);
    CHECK(kind_of("@relation r\n@attribute t date\n@data\n") == ParseError::Kind::Syntax);
    CHECK(kind_of("@relation r\n@attribute n numeric\n@data\nabc\n") == ParseError::Kind::Syntax);
    CHECK(kind_of("@attribute n numeric\n@data\n") == ParseError::Kind::Syntax);
    CHECK(kind_of("@relation r\n@attribute b {0,0}\n@data\n") == ParseError::Kind::Syntax);
    CHECK(kind_of("@relation r\n@attribute b {0,1\n@data\n") == ParseError::Kind::Syntax);
    CHECK(kind_of("@relation r\n@attribute b {0,1}\n@data\n'0\n") == ParseError::Kind::Syntax);
    CHECK(kind_of("@relation r\n@attribute s string\n@data\nq\"r\n") == ParseError::Kind::Syntax);
}

TEST_CASE("serialization quotes only when needed") {
    CHECK(quote_if_needed("File Manager") == "'File Manager'");
    CHECK(quote_if_needed("com.bbm") == "com.bbm");
    CHECK(quote_if_needed("it's") == "'it''s'");
    CHECK(quote_if_needed("") == "''");
    CHECK(quote_if_needed("?") == "'?'");
    CHECK(quote_if_needed("%x") == "'%x'");
    CHECK(quote_if_needed("a,b") == "'a,b'");

    Document d{"r", {{"x", Numeric{}}}, {}};
    CHECK(serialize(d) == "@relation r\n@attribute x numeric\n@data\n");
}

TEST_CASE("check rejects inconsistent documents") {
    Document d{"r", {{"b", Nominal{{"0", "1"}}}}, {{std::string("0")}}};
    CHECK_NOTHROW(check(d));
    d.rows.push_back({std::string("2")});
    CHECK_THROWS_AS(check(d), Error);
    d.rows.back() = {1.0};
    CHECK_THROWS_AS(check(d), Error);
    d.rows.back() = {};
    CHECK_THROWS_AS(check(d), Error);
}

TEST_CASE("string_to_nominal") {
    const auto doc = parse("@relation r\n@attribute s string\n@data\nb\na\nb\n?\n");
    const auto nominal = string_to_nominal(doc, 0);
    CHECK(std::get<Nominal>(nominal.attributes[0].type).values == std::vector<std::string>{"b", "a"});
    CHECK(nominal.rows == doc.rows);
    CHECK_THROWS_AS(string_to_nominal(nominal, 0), Error);
}

TEST_CASE("random documents round-trip") {
    std::mt19937_64 gen(8);
    for (int i = 0; i < 1000; ++i) {
        const auto doc = testgen::random_document(gen);
        REQUIRE_NOTHROW(check(doc));
        const auto text = serialize(doc);
        Document back;
        REQUIRE_NOTHROW(back = parse(text));
        REQUIRE_MESSAGE(back == doc, text);
        REQUIRE(serialize(back) == text);
    }
}

TEST_CASE("parse is total on mangled input") {
    std::mt19937_64 gen(99);
    const auto seed_text = slurp(std::string(APPWATCH_TEST_DATA) + "/fig8.arff");
    for (int i = 0; i < 2000; ++i) {
        std::string text = seed_text;
        const int edits = std::uniform_int_distribution<int>(1, 6)(gen);
        for (int e = 0; e < edits; ++e) {
            const auto pos = gen() % text.size();
            switch (gen() % 3) {
                case 0: text.erase(pos, gen() % 20); break;
                case 1: text.insert(pos, 1, "\n,'\"{}?% @x0"[gen() % 12]); break;
                default: text[pos] = static_cast<char>(gen() % 256); break;
            }
        }
        try {
            const auto doc = parse(text);
            CHECK_NOTHROW(check(doc));
        } catch (const ParseError&) {
        }
    }
}
