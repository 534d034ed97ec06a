#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "causaforge/corpus.hpp"

namespace causaforge {

using ConceptId = std::string;

enum class Relationship { causality, correlation };
enum class Polarity { positive, negative, none };

std::string_view to_string(Relationship r);
std::string_view to_string(Polarity p);
std::optional<Relationship> parse_relationship(std::string_view s);
std::optional<Polarity> parse_polarity(std::string_view s);

struct CausalAssertion {
    ConceptId cause;
    ConceptId effect;
    Relationship relationship = Relationship::causality;
    Polarity polarity = Polarity::none;
    std::string source_doc;
    std::size_t chunk_index = 0;
    // Surface forms as extracted, before normalization.
    std::string cause_label;
    std::string effect_label;

    bool operator==(const CausalAssertion&) const = default;
};

}  // namespace causaforge

namespace causaforge::extraction {

// Assertion as read from a model response; nothing validated yet.
struct RawAssertion {
    std::string cause;
    std::string effect;
    std::string relationship;
    std::optional<std::string> polarity;  // nullopt for JSON null / absent
};

enum class RejectReason { empty_concept, self_loop, bad_enum };
std::string_view to_string(RejectReason r);

struct Rejection {
    RejectReason reason;
    std::string detail;
};

struct Validated {
    CausalAssertion assertion;
    std::vector<std::string> warnings;
};

std::variant<Validated, Rejection> normalize_and_validate(const RawAssertion& raw, std::string_view source_doc,
                                                          std::size_t chunk_index);

// The extraction directive; the chunk text and its doc id are appended.
extern const std::string_view kExtractionDirective;

std::string build_extraction_prompt(const corpus::TextChunk& chunk);

struct ParseOutcome {
    std::vector<CausalAssertion> assertions;
    std::size_t objects_found = 0;
    std::size_t skipped = 0;  // objects without the required fields
    std::vector<Rejection> rejections;
    std::vector<std::string> warnings;
};

// Scans free text for JSON-like objects (tolerating prose, single quotes,
// bare words and trailing commas). Throws ParseFailure when non-empty text
// yields no object at all.
ParseOutcome parse_response(std::string_view raw_text, std::string_view source_doc, std::size_t chunk_index);

// Lower-level: every object carrying a `concept_pair` key, unvalidated.
std::vector<RawAssertion> scan_raw_assertions(std::string_view raw_text, std::size_t* objects_found = nullptr,
                                              std::size_t* skipped = nullptr);

// JSON array in the response shape understood by parse_response.
std::string serialize_assertions(const std::vector<CausalAssertion>& assertions);

// Optional second pass: ask the model whether an assertion holds as stated.
enum class Verdict { yes, no, flip };
std::string build_verification_prompt(const CausalAssertion& a, const corpus::TextChunk& chunk);
std::optional<Verdict> parse_verdict(std::string_view response);
// Applies a verdict: yes keeps, flip swaps cause and effect, no drops.
std::optional<CausalAssertion> apply_verdict(const CausalAssertion& a, Verdict v);

std::string assertions_to_jsonl(const std::vector<CausalAssertion>& assertions);
std::vector<CausalAssertion> read_assertions(const std::filesystem::path& path);

}  // namespace causaforge::extraction
