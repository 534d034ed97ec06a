#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "causaforge/graph.hpp"
#include "causaforge/linkpred.hpp"
#include "causaforge/rate_limiter.hpp"

namespace causaforge::hypogen {

struct Hypothesis {
    std::string id;
    ConceptId concept_a;
    ConceptId concept_b;
    std::string statement;  // verbatim provider output
    double cosine = 0.0;
    double jaccard = 0.0;
    std::string provider_tag;
    std::string created_at;  // ISO-8601 UTC

    bool operator==(const Hypothesis&) const = default;
};

struct GenerationFailure {
    ConceptId concept_a;
    ConceptId concept_b;
    std::string error;
};

struct GenerationResult {
    std::vector<Hypothesis> hypotheses;
    std::vector<GenerationFailure> failures;
};

inline constexpr std::size_t kDefaultCap = 130;
inline constexpr std::size_t kMaxContextConcepts = 5;

std::vector<linkpred::CandidatePair> select_focus_pairs(const std::vector<linkpred::CandidatePair>& ranked,
                                                        const ConceptId& focus, std::size_t cap = kDefaultCap);

// Up to five shared undirected neighbors, ordered by id.
std::vector<ConceptId> shared_neighbors(const graph::CausalGraph& g, const ConceptId& a, const ConceptId& b);

extern const std::string_view kHypothesisTemplate;

std::string build_hypothesis_prompt(const linkpred::CandidatePair& pair, const std::vector<ConceptId>& context);

// Recovers the concept pair named in a prompt built by build_hypothesis_prompt.
std::optional<std::pair<ConceptId, ConceptId>> concepts_in_prompt(std::string_view prompt);

// Deterministic stand-in statement for offline runs without a fixture.
std::string mock_statement(std::string_view prompt);

std::string hypothesis_id(const ConceptId& a, const ConceptId& b);

std::string iso8601_utc(std::int64_t unix_seconds);

struct GenerationOptions {
    std::string model_tag = "gpt-4";
    extraction::RetryPolicy retry;
    // Maps the dispatch time of the successful call to `created_at`. Unset:
    // wall-clock time of the call.
    std::function<std::string(extraction::TimePoint)> timestamp;
};

// One request per distinct (a, b). A pair whose provider calls are exhausted
// lands in `failures`; the rest of the batch proceeds.
GenerationResult generate_hypotheses(const std::vector<linkpred::CandidatePair>& pairs, const graph::CausalGraph& g,
                                     extraction::Provider& provider, extraction::SlidingWindowLimiter& limiter,
                                     extraction::Clock& clock, const GenerationOptions& options = {});

std::string hypotheses_to_jsonl(const std::vector<Hypothesis>& hypotheses);
std::vector<Hypothesis> read_hypotheses(const std::filesystem::path& path);

}  // namespace causaforge::hypogen
