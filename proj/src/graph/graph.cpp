#include "causaforge/graph.hpp"

#include <algorithm>
#include <json.hpp>

#include "causaforge/errors.hpp"
#include "causaforge/io.hpp"
#include "causaforge/text.hpp"

namespace causaforge::graph {

using nlohmann::json;

namespace {

Polarity majority(const std::array<std::size_t, 3>& tally) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < 3; ++i)
        if (tally[i] > tally[best]) best = i;
    for (std::size_t i = 0; i < 3; ++i)
        if (i != best && tally[i] == tally[best]) return Polarity::none;
    return static_cast<Polarity>(best);
}

}  // namespace

EdgeKey edge_key_for(const CausalAssertion& a) {
    if (a.relationship == Relationship::correlation && a.effect < a.cause)
        return {a.effect, a.cause, a.relationship};
    return {a.cause, a.effect, a.relationship};
}

void CausalGraph::upsert(const CausalAssertion& a) {
    if (a.cause.empty() || a.effect.empty() || a.cause == a.effect)
        throw InvalidArgument("assertion violates concept invariants: " + a.cause + " -> " + a.effect);
    const auto ensure = [&](const ConceptId& id, const std::string& label) {
        if (!nodes_.count(id)) {
            nodes_.emplace(id, ConceptNode{id, label.empty() ? id : label});
            links_[id];
        }
    };
    ensure(a.cause, a.cause_label);
    ensure(a.effect, a.effect_label);

    const EdgeKey key = edge_key_for(a);
    const Polarity pol = a.relationship == Relationship::correlation ? Polarity::none : a.polarity;
    auto it = edges_.find(key);
    if (it == edges_.end()) {
        CausalEdge e;
        e.cause = key.cause;
        e.effect = key.effect;
        e.relationship = key.relationship;
        e.support_count = 1;
        e.source_docs.insert(a.source_doc);
        e.polarity_tally[static_cast<std::size_t>(pol)] = 1;
        e.polarity = majority(e.polarity_tally);
        link(e);
        edges_.emplace(key, std::move(e));
        return;
    }
    CausalEdge& e = it->second;
    ++e.support_count;
    e.source_docs.insert(a.source_doc);
    ++e.polarity_tally[static_cast<std::size_t>(pol)];
    e.polarity = majority(e.polarity_tally);
}

void CausalGraph::link(const CausalEdge& e) {
    Links& c = links_[e.cause];
    Links& f = links_[e.effect];
    ++c.out[e.effect];
    ++f.in[e.cause];
    if (e.relationship == Relationship::correlation) {
        ++f.out[e.cause];
        ++c.in[e.effect];
    }
    ++c.incident;
    ++f.incident;
}

void CausalGraph::add_node(ConceptNode node) {
    if (node.id.empty()) throw InvariantViolation("empty concept id");
    if (text::normalize_concept(node.id) != node.id)
        throw InvariantViolation("concept id is not normalized: '" + node.id + "'");
    const ConceptId id = node.id;
    if (!nodes_.emplace(id, std::move(node)).second) throw InvariantViolation("duplicate concept " + id);
    links_[id];
}

void CausalGraph::add_edge(CausalEdge e) {
    if (!nodes_.count(e.cause)) throw InvariantViolation("edge names unknown concept " + e.cause);
    if (!nodes_.count(e.effect)) throw InvariantViolation("edge names unknown concept " + e.effect);
    if (e.cause == e.effect) throw InvariantViolation("self loop on " + e.cause);
    if (e.support_count < 1) throw InvariantViolation("support_count below 1");
    if (e.polarity_tally[0] + e.polarity_tally[1] + e.polarity_tally[2] != e.support_count)
        throw InvariantViolation("polarity tally does not sum to support_count");
    if (e.polarity != majority(e.polarity_tally)) throw InvariantViolation("polarity disagrees with its tally");
    if (e.source_docs.empty()) throw InvariantViolation("edge without source documents");
    if (e.relationship == Relationship::correlation) {
        if (!(e.cause < e.effect)) throw InvariantViolation("correlation edge key not ordered");
        if (e.polarity_tally[0] || e.polarity_tally[1]) throw InvariantViolation("correlation edge with polarity");
    }
    const EdgeKey key = e.key();
    if (edges_.count(key)) throw InvariantViolation("duplicate edge " + key.cause + " -> " + key.effect);
    link(e);
    edges_.emplace(key, std::move(e));
}

std::size_t CausalGraph::arc_count() const {
    std::size_t n = 0;
    for (const auto& [key, e] : edges_) n += e.relationship == Relationship::correlation ? 2 : 1;
    return n;
}

const CausalGraph::Links& CausalGraph::links_of(const ConceptId& v) const {
    auto it = links_.find(v);
    if (it == links_.end()) throw UnknownConcept("unknown concept '" + v + "'");
    return it->second;
}

std::set<ConceptId> CausalGraph::neighbor_set(const ConceptId& v, Direction d) const {
    const Links& l = links_of(v);
    std::set<ConceptId> out;
    if (d != Direction::out)
        for (const auto& [u, n] : l.in) out.insert(u);
    if (d != Direction::in)
        for (const auto& [u, n] : l.out) out.insert(u);
    return out;
}

std::size_t CausalGraph::degree(const ConceptId& v, Direction d) const {
    const Links& l = links_of(v);
    const auto sum = [](const std::map<ConceptId, std::size_t>& m) {
        std::size_t s = 0;
        for (const auto& [u, n] : m) s += n;
        return s;
    };
    switch (d) {
        case Direction::in: return sum(l.in);
        case Direction::out: return sum(l.out);
        case Direction::undirected: break;
    }
    return l.incident;
}

bool CausalGraph::connected(const ConceptId& a, const ConceptId& b) const {
    const Links& l = links_of(a);
    return l.out.count(b) != 0 || l.in.count(b) != 0;
}

bool CausalGraph::structurally_equal(const CausalGraph& other) const {
    if (nodes_.size() != other.nodes_.size() || edges_ != other.edges_) return false;
    return std::equal(nodes_.begin(), nodes_.end(), other.nodes_.begin(),
                      [](const auto& x, const auto& y) { return x.first == y.first; });
}

std::vector<std::pair<ConceptId, std::size_t>> degree_ranking(const CausalGraph& g, std::size_t k, Direction d) {
    std::vector<std::pair<ConceptId, std::size_t>> all;
    all.reserve(g.node_count());
    for (const auto& [id, node] : g.nodes()) all.emplace_back(id, g.degree(id, d));
    const auto better = [](const auto& x, const auto& y) {
        return x.second != y.second ? x.second > y.second : x.first < y.first;
    };
    k = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), better);
    all.resize(k);
    return all;
}

std::string format_degree_report(const std::vector<std::pair<ConceptId, std::size_t>>& ranking, Direction d) {
    const char* dir = d == Direction::in ? "in" : d == Direction::out ? "out" : "undirected";
    std::string out = std::string("Number\tConcepts\tDegree (") + dir + ")\n";
    for (std::size_t i = 0; i < ranking.size(); ++i)
        out += std::to_string(i + 1) + "\t" + ranking[i].first + "\t" + std::to_string(ranking[i].second) + "\n";
    return out;
}

std::string serialize_graph(const CausalGraph& g) {
    std::string out;
    out += json{{"format", kGraphFormat}, {"nodes", g.node_count()}, {"edges", g.edge_count()}}.dump() + "\n";
    for (const auto& [id, node] : g.nodes())
        out += json{{"kind", "node"}, {"id", id}, {"label", node.display_label}}.dump() + "\n";
    for (const auto& [key, e] : g.edges()) {
        json j = {{"kind", "edge"},
                  {"cause", e.cause},
                  {"effect", e.effect},
                  {"relationship", std::string(to_string(e.relationship))},
                  {"polarity", std::string(to_string(e.polarity))},
                  {"support_count", e.support_count},
                  {"polarity_tally",
                   {{"positive", e.polarity_tally[0]}, {"negative", e.polarity_tally[1]}, {"none", e.polarity_tally[2]}}},
                  {"source_docs", e.source_docs}};
        out += j.dump() + "\n";
    }
    return out;
}

CausalGraph parse_graph(const std::vector<std::string>& lines) {
    if (lines.empty()) throw CorruptRecord(1, "missing header");
    std::size_t node_total = 0;
    std::size_t edge_total = 0;
    try {
        const json h = json::parse(lines[0]);
        if (h.at("format").get<std::string>() != kGraphFormat) throw CorruptRecord(1, "unsupported format");
        node_total = h.at("nodes").get<std::size_t>();
        edge_total = h.at("edges").get<std::size_t>();
    } catch (const json::exception& e) {
        throw CorruptRecord(1, e.what());
    }

    CausalGraph g;
    std::size_t i = 1;
    for (; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (lines[i].empty()) {
            if (i + 1 == lines.size()) break;
            throw CorruptRecord(line_no, "blank line");
        }
        json j;
        try {
            j = json::parse(lines[i]);
        } catch (const json::exception& e) {
            throw CorruptRecord(line_no, e.what());
        }
        const bool expect_node = i <= node_total;
        try {
            const std::string kind = j.at("kind").get<std::string>();
            if (expect_node) {
                if (kind != "node") throw CorruptRecord(line_no, "expected a node record");
                g.add_node({j.at("id").get<std::string>(), j.at("label").get<std::string>()});
            } else {
                if (kind != "edge") throw CorruptRecord(line_no, "expected an edge record");
                if (i > node_total + edge_total) throw CorruptRecord(line_no, "more records than the header declares");
                CausalEdge e;
                e.cause = j.at("cause").get<std::string>();
                e.effect = j.at("effect").get<std::string>();
                const auto rel = parse_relationship(j.at("relationship").get<std::string>());
                const auto pol = parse_polarity(j.at("polarity").get<std::string>());
                if (!rel || !pol) throw CorruptRecord(line_no, "bad enum value");
                e.relationship = *rel;
                e.polarity = *pol;
                e.support_count = j.at("support_count").get<std::size_t>();
                const json& t = j.at("polarity_tally");
                e.polarity_tally = {t.at("positive").get<std::size_t>(), t.at("negative").get<std::size_t>(),
                                    t.at("none").get<std::size_t>()};
                for (const auto& d : j.at("source_docs")) e.source_docs.insert(d.get<std::string>());
                g.add_edge(std::move(e));
            }
        } catch (const json::exception& e) {
            throw CorruptRecord(line_no, e.what());
        }
    }
    if (g.node_count() != node_total || g.edge_count() != edge_total)
        throw CorruptRecord(i + 1, "truncated: header declares " + std::to_string(node_total) + " nodes and " +
                                       std::to_string(edge_total) + " edges");
    return g;
}

void save_graph(const CausalGraph& g, const std::filesystem::path& path) { io::write_atomic(path, serialize_graph(g)); }

CausalGraph load_graph(const std::filesystem::path& path) { return parse_graph(io::read_lines(path)); }

}  // namespace causaforge::graph
