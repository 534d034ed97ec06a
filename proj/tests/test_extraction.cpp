#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "causaforge/errors.hpp"
#include "causaforge/extraction.hpp"
#include "causaforge/io.hpp"
#include "causaforge/rng.hpp"

using namespace causaforge;
using namespace causaforge::extraction;

namespace {

const std::filesystem::path kSource = CAUSAFORGE_SOURCE_DIR;

CausalAssertion make(std::string c, std::string e, Relationship r, Polarity p) {
    CausalAssertion a;
    a.cause = std::move(c);
    a.effect = std::move(e);
    a.relationship = r;
    a.polarity = p;
    a.source_doc = "D1";
    a.chunk_index = 3;
    a.cause_label = a.cause;
    a.effect_label = a.effect;
    return a;
}

}  // namespace

TEST(Prompt, CarriesDirectiveAndDocId) {
    corpus::TextChunk chunk{"PMC8451848", 0, "Stress reduces sleep.", 6};
    const auto p = build_extraction_prompt(chunk);
    EXPECT_NE(p.find("Format the relationships in JSON format"), std::string::npos);
    EXPECT_NE(p.find("Exclude any relationships that are attributed to or cited from other research studies"),
              std::string::npos);
    EXPECT_NE(p.find("PMC8451848"), std::string::npos);
    EXPECT_NE(p.find("Stress reduces sleep."), std::string::npos);
    corpus::TextChunk empty{"D", 0, "", 0};
    EXPECT_THROW(build_extraction_prompt(empty), InvalidArgument);
}

TEST(Parse, SampleResponse) {
    const auto text = io::read_file(kSource / "tests/data/sample_response.txt");
    const auto out = parse_response(text, "PMC8451848", 2);
    ASSERT_EQ(out.assertions.size(), 2u);
    EXPECT_EQ(out.assertions[0].cause, "openness to change values");
    EXPECT_EQ(out.assertions[0].effect, "well-being");
    EXPECT_EQ(out.assertions[1].cause, "cognitive reappraisal");
    EXPECT_EQ(out.assertions[1].effect, "psychological well-being");
    EXPECT_EQ(out.assertions[1].effect_label, "Psychological well-being");
    for (const auto& a : out.assertions) {
        EXPECT_EQ(a.relationship, Relationship::causality);
        EXPECT_EQ(a.polarity, Polarity::positive);
        EXPECT_EQ(a.source_doc, "PMC8451848");
        EXPECT_EQ(a.chunk_index, 2u);
    }
}

TEST(Parse, ProseAroundJson) {
    const auto out = parse_response(
        "Here are the pairs: [{\"concept_pair\": [\"Stress\", \"Sleep\"], \"relationship\": \"causality\", "
        "\"positive/negative\": \"negative\"},] Hope this helps",
        "D", 0);
    ASSERT_EQ(out.assertions.size(), 1u);
    EXPECT_EQ(out.assertions[0].polarity, Polarity::negative);
}

TEST(Parse, NoJsonIsFailure) {
    EXPECT_THROW(parse_response("I found no relationships.", "D", 0), ParseFailure);
    EXPECT_TRUE(parse_response("", "D", 0).assertions.empty());
}

TEST(Parse, SkipsObjectsWithoutFields) {
    const auto out = parse_response(
        "{\"note\": \"x\"}, {\"concept_pair\": [\"a\", \"b\"], \"relationship\": \"correlation\", "
        "\"positive/negative\": null}",
        "D", 0);
    EXPECT_EQ(out.objects_found, 2u);
    EXPECT_EQ(out.skipped, 1u);
    ASSERT_EQ(out.assertions.size(), 1u);
    EXPECT_EQ(out.assertions[0].polarity, Polarity::none);
}

TEST(Validate, Normalization) {
    auto r = normalize_and_validate({" Well-Being ", "Sleep", "causality", "positive"}, "D", 0);
    ASSERT_TRUE(std::holds_alternative<Validated>(r));
    EXPECT_EQ(std::get<Validated>(r).assertion.cause, "well-being");
    EXPECT_EQ(std::get<Validated>(r).assertion.cause_label, "Well-Being");
}

TEST(Validate, Rejections) {
    auto self = normalize_and_validate({"stress", "Stress", "causality", "positive"}, "D", 0);
    ASSERT_TRUE(std::holds_alternative<Rejection>(self));
    EXPECT_EQ(std::get<Rejection>(self).reason, RejectReason::self_loop);

    auto empty = normalize_and_validate({"  ..", "x", "causality", "positive"}, "D", 0);
    ASSERT_TRUE(std::holds_alternative<Rejection>(empty));
    EXPECT_EQ(std::get<Rejection>(empty).reason, RejectReason::empty_concept);

    auto bad = normalize_and_validate({"a", "b", "causes", "positive"}, "D", 0);
    ASSERT_TRUE(std::holds_alternative<Rejection>(bad));
    EXPECT_EQ(std::get<Rejection>(bad).reason, RejectReason::bad_enum);
}

TEST(Validate, CorrelationPolarityCoerced) {
    auto r = normalize_and_validate({"a", "b", "correlation", "positive"}, "D", 0);
    ASSERT_TRUE(std::holds_alternative<Validated>(r));
    const auto& v = std::get<Validated>(r);
    EXPECT_EQ(v.assertion.polarity, Polarity::none);
    EXPECT_FALSE(v.warnings.empty());
}

TEST(Parse, SerializeRoundTrip) {
    const std::vector<CausalAssertion> as{
        make("openness to change values", "well-being", Relationship::causality, Polarity::positive),
        make("stress", "sleep quality", Relationship::causality, Polarity::negative),
        make("anxiety", "rumination", Relationship::correlation, Polarity::none),
        make("self \"quoted\" concept", "b", Relationship::causality, Polarity::none),
    };
    const auto out = parse_response(serialize_assertions(as), "D1", 3);
    EXPECT_EQ(out.assertions, as);
}

// Fuzzed responses: whatever comes out satisfies the assertion invariants.
TEST(Parse, FuzzedResponsesYieldValidAssertions) {
    const std::vector<std::string> atoms{"{", "}", "[", "]", ",", ":", "\"", "'", "concept_pair", "relationship",
                                         "causality", "correlation", "positive", "None", "null", " ", "\n",
                                         "Stress", "stress", "well-being", "x", "positive/negative"};
    Rng rng(99);
    for (int trial = 0; trial < 2000; ++trial) {
        std::string s;
        const std::size_t n = rng.below(60);
        for (std::size_t i = 0; i < n; ++i) s += atoms[rng.below(atoms.size())];
        try {
            for (const auto& a : parse_response(s, "D", 0).assertions) {
                EXPECT_FALSE(a.cause.empty());
                EXPECT_FALSE(a.effect.empty());
                EXPECT_NE(a.cause, a.effect);
                if (a.relationship == Relationship::correlation) EXPECT_EQ(a.polarity, Polarity::none);
            }
        } catch (const ParseFailure&) {
        }
    }
}

TEST(Verify, Verdicts) {
    EXPECT_EQ(parse_verdict("Yes, the text supports it."), Verdict::yes);
    EXPECT_EQ(parse_verdict("no"), Verdict::no);
    EXPECT_EQ(parse_verdict("FLIP - reversed"), Verdict::flip);
    EXPECT_FALSE(parse_verdict("maybe").has_value());

    const auto a = make("a", "b", Relationship::causality, Polarity::positive);
    EXPECT_EQ(apply_verdict(a, Verdict::yes), a);
    EXPECT_FALSE(apply_verdict(a, Verdict::no).has_value());
    const auto f = apply_verdict(a, Verdict::flip);
    ASSERT_TRUE(f.has_value());
    EXPECT_EQ(f->cause, "b");
    EXPECT_EQ(f->effect, "a");

    corpus::TextChunk chunk{"D1", 0, "A causes B.", 3};
    const auto p = build_verification_prompt(a, chunk);
    EXPECT_NE(p.find("A causes B."), std::string::npos);
}

TEST(Assertions, JsonlRoundTrip) {
    std::vector<CausalAssertion> as{make("a", "b", Relationship::causality, Polarity::negative),
                                    make("c", "d", Relationship::correlation, Polarity::none)};
    as[0].cause_label = "A";
    const auto path = std::filesystem::temp_directory_path() / "causaforge-assertions.jsonl";
    std::ofstream(path) << assertions_to_jsonl(as);
    EXPECT_EQ(read_assertions(path), as);
    std::filesystem::remove(path);
}
