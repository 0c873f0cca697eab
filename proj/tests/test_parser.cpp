#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "istar/parser.hpp"
#include "istar/validator.hpp"
#include "test_support.hpp"

using namespace istar;

namespace {

bool has_code(const std::vector<Diagnostic>& diags, const std::string& code) {
    for (const Diagnostic& d : diags)
        if (d.code == code) return true;
    return false;
}

}  // namespace

TEST_CASE("single actor declaration") {
    ParseOutcome outcome = parse("actor \"Travel agency\" {}", "t.istar");
    REQUIRE(outcome.ok());
    REQUIRE(outcome.model->actors.size() == 1);
    CHECK(outcome.model->actors[0].name == "Travel agency");
    CHECK(outcome.model->actors[0].kind == ActorKind::GenericActor);
    CHECK(outcome.model->elements.empty());
}

TEST_CASE("travel corpus parses, validates and has the hand-counted shape") {
    ParseOutcome outcome =
        parse(istar::test::read_file(istar::test::corpus_path()),
              "travel.istar");
    REQUIRE(outcome.ok());
    const Model& m = *outcome.model;

    CHECK(m.actors.size() == 6);
    CHECK(m.elements.size() == 18);  // 14 boundary elements + 4 dependums
    CHECK(m.actorLinks.size() == 3);
    CHECK(m.refinements.size() == 5);
    CHECK(m.elementLinks.size() == 4);
    CHECK(m.dependencies.size() == 4);

    CHECK(validate(m).empty());

    // span totality: every id is covered by the source map
    auto covered = [&](std::uint32_t id) {
        return m.sourceMap.count(id) > 0;
    };
    for (const Actor& a : m.actors) CHECK(covered(a.id.value));
    for (const IntentionalElement& e : m.elements) CHECK(covered(e.id.value));
    for (const ActorLink& l : m.actorLinks) CHECK(covered(l.id.value));
    for (const Refinement& r : m.refinements) CHECK(covered(r.id.value));
    for (const ElementLink& l : m.elementLinks) CHECK(covered(l.id.value));
    for (const Dependency& d : m.dependencies) CHECK(covered(d.id.value));
}

TEST_CASE("syntax errors") {
    SUBCASE("missing closing brace") {
        ParseOutcome outcome =
            parse("role \"Student\" { goal \"Trip organized\"", "t.istar");
        CHECK_FALSE(outcome.ok());
        REQUIRE_FALSE(outcome.diagnostics.empty());
        CHECK(outcome.diagnostics[0].code == "P001");
    }
    SUBCASE("unterminated quote") {
        ParseOutcome outcome = parse("actor \"oops {}", "t.istar");
        CHECK_FALSE(outcome.ok());
        CHECK(has_code(outcome.diagnostics, "P001"));
    }
    SUBCASE("recovery reports one error per statement") {
        ParseOutcome outcome = parse("role \"A\" {\n"
                                     "  goal 42\n"
                                     "  task \"ok\"\n"
                                     "  quality ???\n"
                                     "}\n",
                                     "t.istar");
        CHECK_FALSE(outcome.ok());
        int errors = 0;
        for (const Diagnostic& d : outcome.diagnostics)
            if (d.severity == Severity::Error) ++errors;
        CHECK(errors >= 2);
    }
}

TEST_CASE("name resolution") {
    SUBCASE("ambiguous reference is an error, not a silent pick") {
        ParseOutcome outcome = parse("role \"A\" {\n"
                                     "  goal \"X\"\n"
                                     "  goal \"X\"\n"
                                     "  refine or \"X\" <- \"X\"\n"
                                     "}\n",
                                     "t.istar");
        CHECK_FALSE(outcome.ok());
        CHECK(has_code(outcome.diagnostics, "P003"));
    }
    SUBCASE("local ids disambiguate") {
        ParseOutcome outcome = parse("role \"A\" {\n"
                                     "  goal \"X\" as x1\n"
                                     "  goal \"X\" as x2\n"
                                     "  refine or x1 <- x2\n"
                                     "}\n",
                                     "t.istar");
        REQUIRE(outcome.ok());
        CHECK(outcome.model->refinements.size() == 1);
    }
    SUBCASE("duplicate local id") {
        ParseOutcome outcome = parse("role \"A\" {\n"
                                     "  goal \"X\" as e\n"
                                     "  goal \"Y\" as e\n"
                                     "}\n",
                                     "t.istar");
        CHECK_FALSE(outcome.ok());
        CHECK(has_code(outcome.diagnostics, "P004"));
    }
    SUBCASE("forward references work") {
        ParseOutcome outcome =
            parse("link isa \"B\" -> \"A\"\n"
                  "role \"A\" {}\nrole \"B\" {}\n",
                  "t.istar");
        REQUIRE(outcome.ok());
        CHECK(outcome.model->actorLinks.size() == 1);
    }
    SUBCASE("unresolved names") {
        ParseOutcome outcome = parse("link isa \"A\" -> \"B\"\n", "t.istar");
        CHECK_FALSE(outcome.ok());
        CHECK(has_code(outcome.diagnostics, "P002"));
    }
}

TEST_CASE("construction errors carry spans") {
    ParseOutcome outcome = parse("role \"A\" {\n"
                                 "  goal \"G\"\n"
                                 "  task \"T\"\n"
                                 "  contribute help \"G\" -> \"T\"\n"
                                 "}\n",
                                 "t.istar");
    CHECK_FALSE(outcome.ok());
    REQUIRE(has_code(outcome.diagnostics, "E013"));
    for (const Diagnostic& d : outcome.diagnostics)
        if (d.code == "E013") {
            REQUIRE(d.primary.span.has_value());
            CHECK(d.primary.span->startLine == 4);
        }
}

TEST_CASE("byte-order mark is skipped with a warning") {
    std::string source = "\xEF\xBB\xBF" "actor \"A\" {}";
    ParseOutcome outcome = parse(source, "t.istar");
    REQUIRE(outcome.ok());
    REQUIRE(outcome.diagnostics.size() == 1);
    CHECK(outcome.diagnostics[0].severity == Severity::Warning);
    CHECK(outcome.diagnostics[0].code == "P005");
}

TEST_CASE("format") {
    SUBCASE("empty model formats to empty text") {
        CHECK(format(Model{}) == "");
    }
    SUBCASE("names with quotes, backslashes and newlines survive") {
        Model m;
        ActorId a = *add_actor(m, "He said \"hi\"\\\n", ActorKind::Role);
        (void)add_element(m, a, "tab\there", ElementKind::Goal);
        std::string text = format(m);
        ParseOutcome outcome = parse(text, "t.istar");
        REQUIRE(outcome.ok());
        CHECK(outcome.model->actors[0].name == "He said \"hi\"\\\n");
        CHECK(outcome.model->elements[0].name == "tab\there");
    }
    SUBCASE("duplicate element names get generated local ids") {
        ParseOutcome outcome = parse("role \"A\" {\n"
                                     "  goal \"X\" as x1\n"
                                     "  goal \"X\" as x2\n"
                                     "  refine or x1 <- x2\n"
                                     "}\n",
                                     "t.istar");
        REQUIRE(outcome.ok());
        std::string text = format(*outcome.model);
        ParseOutcome again = parse(text, "t.istar");
        REQUIRE(again.ok());
        CHECK(istar::test::structurally_equal(*outcome.model, *again.model));
    }
    SUBCASE("formatting is canonical: format(parse(format(m))) == format(m)") {
        Model m = istar::test::load_corpus();
        std::string once = format(m);
        ParseOutcome outcome = parse(once, "t.istar");
        REQUIRE(outcome.ok());
        CHECK(format(*outcome.model) == once);
    }
}

TEST_CASE("round-trip: parse(format(m)) is structurally equal to m") {
    std::mt19937 rng(7);
    for (int round = 0; round < 100; ++round) {
        Model m = istar::test::random_model(rng);
        std::string text = format(m);
        ParseOutcome outcome = parse(text, "gen.istar");
        REQUIRE_MESSAGE(outcome.ok(), "round ", round, " failed to reparse");
        CHECK_MESSAGE(istar::test::structurally_equal(m, *outcome.model),
                      "round ", round, " signature mismatch");
    }
}

TEST_CASE("parse and format are deterministic") {
    std::string source = istar::test::read_file(istar::test::corpus_path());
    ParseOutcome a = parse(source, "travel.istar");
    ParseOutcome b = parse(source, "travel.istar");
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(format(*a.model) == format(*b.model));
}
