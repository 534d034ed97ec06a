#include "causaforge/linkpred.hpp"

#include <algorithm>
#include <json.hpp>

#include "causaforge/errors.hpp"
#include "causaforge/io.hpp"

namespace causaforge::linkpred {

using nlohmann::json;

std::vector<CandidatePair> enumerate_candidates(const graph::CausalGraph& g, const embedding::EmbeddingTable& table,
                                                double threshold, const std::optional<std::set<ConceptId>>& focus) {
    if (!(threshold >= -1.0 && threshold <= 1.0)) throw InvalidArgument("threshold must lie in [-1, 1]");
    for (const auto& [id, node] : g.nodes()) table.at(id);  // MissingEmbedding
    if (focus)
        for (const auto& f : *focus)
            if (!g.contains(f)) throw UnknownConcept("focus concept '" + f + "' is not in the graph");

    std::vector<CandidatePair> out;
    const auto consider = [&](const ConceptId& x, const ConceptId& y) {
        if (g.connected(x, y)) return;
        const double cos = embedding::cosine_similarity(table.at(x), table.at(y));
        if (cos >= threshold) out.push_back({x, y, cos, 0.0});
    };

    if (!focus) {
        for (auto i = g.nodes().begin(); i != g.nodes().end(); ++i)
            for (auto j = std::next(i); j != g.nodes().end(); ++j) consider(i->first, j->first);
        return out;
    }
    for (const auto& f : *focus) {
        for (const auto& [v, node] : g.nodes()) {
            if (v == f) continue;
            // A pair of two focus concepts is visited once, from its smaller end.
            if (focus->count(v) && v < f) continue;
            if (f < v)
                consider(f, v);
            else
                consider(v, f);
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
    return out;
}

double jaccard_score(const graph::CausalGraph& g, const ConceptId& a, const ConceptId& b) {
    auto na = g.neighbor_set(a, graph::Direction::undirected);
    auto nb = g.neighbor_set(b, graph::Direction::undirected);
    na.erase(a);
    na.erase(b);
    nb.erase(a);
    nb.erase(b);
    std::size_t common = 0;
    for (const auto& x : na) common += nb.count(x);
    const std::size_t uni = na.size() + nb.size() - common;
    return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

void score_candidates(const graph::CausalGraph& g, std::vector<CandidatePair>& pairs) {
    for (auto& p : pairs) p.jaccard = jaccard_score(g, p.a, p.b);
}

std::vector<CandidatePair> rank_candidates(std::vector<CandidatePair> pairs, std::size_t k) {
    std::sort(pairs.begin(), pairs.end(), [](const CandidatePair& x, const CandidatePair& y) {
        if (x.jaccard != y.jaccard) return x.jaccard > y.jaccard;
        if (x.cosine != y.cosine) return x.cosine > y.cosine;
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    if (pairs.size() > k) pairs.resize(k);
    return pairs;
}

std::vector<CandidatePair> predict_links(const graph::CausalGraph& g, const embedding::EmbeddingTable& table,
                                         double threshold, const std::optional<std::set<ConceptId>>& focus,
                                         std::size_t k) {
    auto pairs = enumerate_candidates(g, table, threshold, focus);
    score_candidates(g, pairs);
    return rank_candidates(std::move(pairs), k);
}

std::string candidates_to_jsonl(const std::vector<CandidatePair>& pairs) {
    std::string out;
    for (const auto& p : pairs) out += json{{"a", p.a}, {"b", p.b}, {"cosine", p.cosine}, {"jaccard", p.jaccard}}.dump() + "\n";
    return out;
}

std::vector<CandidatePair> read_candidates(const std::filesystem::path& path) {
    const auto lines = io::read_lines(path);
    std::vector<CandidatePair> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        try {
            const json j = json::parse(lines[i]);
            CandidatePair p{j.at("a").get<std::string>(), j.at("b").get<std::string>(), j.at("cosine").get<double>(),
                            j.at("jaccard").get<double>()};
            if (!(p.a < p.b)) throw CorruptRecord(i + 1, "candidate pair not ordered");
            if (p.jaccard < 0.0 || p.jaccard > 1.0) throw CorruptRecord(i + 1, "jaccard outside [0, 1]");
            out.push_back(std::move(p));
        } catch (const json::exception& e) {
            throw CorruptRecord(i + 1, e.what());
        }
    }
    return out;
}

}  // namespace causaforge::linkpred
