#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <vector>

#include "causaforge/embedding.hpp"
#include "causaforge/graph.hpp"

namespace causaforge::linkpred {

struct CandidatePair {
    ConceptId a;  // a < b
    ConceptId b;
    double cosine = 0.0;
    double jaccard = 0.0;

    bool operator==(const CandidatePair&) const = default;
};

inline constexpr double kDefaultThreshold = 0.5;

// Unconnected pairs whose embedding cosine clears `threshold`, sorted by
// (a, b). With a focus set only pairs touching it are considered; without
// one, every node pair is scanned (quadratic, small graphs only).
std::vector<CandidatePair> enumerate_candidates(const graph::CausalGraph& g, const embedding::EmbeddingTable& table,
                                                double threshold,
                                                const std::optional<std::set<ConceptId>>& focus = std::nullopt);

// |N(a) ∩ N(b)| / |N(a) ∪ N(b)| over undirected neighbors, with a and b
// removed from both sets. 0 when the union is empty.
double jaccard_score(const graph::CausalGraph& g, const ConceptId& a, const ConceptId& b);

void score_candidates(const graph::CausalGraph& g, std::vector<CandidatePair>& pairs);

// Jaccard desc, cosine desc, then (a, b); first k.
std::vector<CandidatePair> rank_candidates(std::vector<CandidatePair> pairs, std::size_t k);

std::vector<CandidatePair> predict_links(const graph::CausalGraph& g, const embedding::EmbeddingTable& table,
                                         double threshold, const std::optional<std::set<ConceptId>>& focus,
                                         std::size_t k);

std::string candidates_to_jsonl(const std::vector<CandidatePair>& pairs);
std::vector<CandidatePair> read_candidates(const std::filesystem::path& path);

}  // namespace causaforge::linkpred
