#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "causaforge/extraction.hpp"

namespace causaforge::graph {

struct ConceptNode {
    ConceptId id;
    std::string display_label;  // first surface form seen

    bool operator==(const ConceptNode&) const = default;
};

struct EdgeKey {
    ConceptId cause;
    ConceptId effect;
    Relationship relationship = Relationship::causality;

    auto operator<=>(const EdgeKey&) const = default;
};

struct CausalEdge {
    ConceptId cause;
    ConceptId effect;
    Relationship relationship = Relationship::causality;
    Polarity polarity = Polarity::none;  // majority of the tally; ties -> none
    std::size_t support_count = 0;
    std::set<std::string> source_docs;
    std::array<std::size_t, 3> polarity_tally{};  // indexed by Polarity

    EdgeKey key() const { return {cause, effect, relationship}; }
    bool operator==(const CausalEdge&) const = default;
};

enum class Direction { in, out, undirected };

// Directed concept graph. Correlation edges are stored once under the
// lexicographically ordered key and act in both directions for neighbor and
// degree queries. Mutations must be serialized by the caller; const queries
// are safe to run concurrently.
class CausalGraph {
public:
    void upsert(const CausalAssertion& a);

    bool contains(const ConceptId& id) const { return nodes_.count(id) != 0; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    // Directed arcs: a correlation edge counts once per direction.
    std::size_t arc_count() const;

    const std::map<ConceptId, ConceptNode>& nodes() const { return nodes_; }
    const std::map<EdgeKey, CausalEdge>& edges() const { return edges_; }

    // Throws UnknownConcept.
    std::set<ConceptId> neighbor_set(const ConceptId& v, Direction d) const;
    std::size_t degree(const ConceptId& v, Direction d) const;

    // Any edge, either direction, either relationship.
    bool connected(const ConceptId& a, const ConceptId& b) const;

    // Comparison ignores display labels (they depend on insertion order).
    bool structurally_equal(const CausalGraph& other) const;

    // Used by the loader; validates endpoints and edge invariants.
    void add_node(ConceptNode node);
    void add_edge(CausalEdge edge);

private:
    struct Links {
        std::map<ConceptId, std::size_t> out;  // neighbor -> edge multiplicity
        std::map<ConceptId, std::size_t> in;
        std::size_t incident = 0;  // edges touching the node, each once
    };

    void link(const CausalEdge& e);
    const Links& links_of(const ConceptId& v) const;

    std::map<ConceptId, ConceptNode> nodes_;
    std::map<EdgeKey, CausalEdge> edges_;
    std::unordered_map<ConceptId, Links> links_;
};

// Key an assertion lands on (correlations are ordered).
EdgeKey edge_key_for(const CausalAssertion& a);

std::vector<std::pair<ConceptId, std::size_t>> degree_ranking(const CausalGraph& g, std::size_t k, Direction d);

// Tab-separated "Number / Concepts / Degree (<dir>)" table.
std::string format_degree_report(const std::vector<std::pair<ConceptId, std::size_t>>& ranking, Direction d);

inline constexpr const char* kGraphFormat = "causaforge-graph v1";

std::string serialize_graph(const CausalGraph& g);
CausalGraph parse_graph(const std::vector<std::string>& lines);
void save_graph(const CausalGraph& g, const std::filesystem::path& path);
CausalGraph load_graph(const std::filesystem::path& path);

}  // namespace causaforge::graph
