#include "causaforge/embedding.hpp"

#include <algorithm>

#include "causaforge/errors.hpp"
#include "causaforge/hash.hpp"
#include "causaforge/rng.hpp"

namespace causaforge::embedding {

void EmbeddingConfig::validate() const {
    if (dims < 1 || walk_length < 1 || walks_per_node < 1 || window < 1 || negatives_per_positive < 1 || epochs < 1)
        throw InvalidArgument("embedding counts must be >= 1");
    if (!(return_param_p > 0) || !(inout_param_q > 0)) throw InvalidArgument("p and q must be > 0");
    if (!(initial_learning_rate > 0)) throw InvalidArgument("learning rate must be > 0");
}

std::vector<std::vector<ConceptId>> WalkSet::as_ids() const {
    std::vector<std::vector<ConceptId>> out;
    out.reserve(walks.size());
    for (const auto& w : walks) {
        auto& ids = out.emplace_back();
        ids.reserve(w.size());
        for (auto i : w) ids.push_back(vocab[i]);
    }
    return out;
}

std::uint64_t default_walk_seed(std::uint64_t seed, const ConceptId& start, std::size_t walk) {
    return splitmix64(splitmix64(seed ^ fnv1a64(start)) + walk);
}

namespace {

using Adjacency = std::vector<std::vector<std::uint32_t>>;

std::vector<std::uint32_t> one_walk(const Adjacency& adj, std::uint32_t start, const EmbeddingConfig& cfg, Rng& rng,
                                    std::vector<double>& weights) {
    std::vector<std::uint32_t> walk;
    walk.reserve(cfg.walk_length);
    walk.push_back(start);
    if (cfg.walk_length < 2 || adj[start].empty()) return walk;
    walk.push_back(adj[start][rng.below(adj[start].size())]);

    const bool uniform = cfg.return_param_p == 1.0 && cfg.inout_param_q == 1.0;
    const double w_return = 1.0 / cfg.return_param_p;
    const double w_out = 1.0 / cfg.inout_param_q;
    while (walk.size() < cfg.walk_length) {
        const std::uint32_t cur = walk.back();
        const std::uint32_t prev = walk[walk.size() - 2];
        const auto& nbrs = adj[cur];
        if (nbrs.empty()) break;
        if (uniform) {
            walk.push_back(nbrs[rng.below(nbrs.size())]);
            continue;
        }
        const auto& prev_nbrs = adj[prev];
        weights.resize(nbrs.size());
        double total = 0.0;
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            const std::uint32_t x = nbrs[i];
            if (x == prev)
                weights[i] = w_return;
            else if (std::binary_search(prev_nbrs.begin(), prev_nbrs.end(), x))
                weights[i] = 1.0;
            else
                weights[i] = w_out;
            total += weights[i];
        }
        double r = rng.uniform() * total;
        std::size_t pick = nbrs.size() - 1;
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            r -= weights[i];
            if (r < 0) {
                pick = i;
                break;
            }
        }
        walk.push_back(nbrs[pick]);
    }
    return walk;
}

}  // namespace

WalkSet generate_walks(const graph::CausalGraph& g, const EmbeddingConfig& config, const WalkSeedFn& seed_fn) {
    config.validate();
    if (g.node_count() == 0) throw InvalidArgument("cannot walk an empty graph");

    WalkSet out;
    std::map<ConceptId, std::uint32_t> index;
    for (const auto& [id, node] : g.nodes()) {
        index.emplace(id, static_cast<std::uint32_t>(out.vocab.size()));
        out.vocab.push_back(id);
    }
    const auto dir = config.directed_walks ? graph::Direction::out : graph::Direction::undirected;
    Adjacency adj(out.vocab.size());
    for (std::size_t i = 0; i < out.vocab.size(); ++i)
        for (const auto& u : g.neighbor_set(out.vocab[i], dir)) adj[i].push_back(index.at(u));  // sorted: set order

    std::vector<double> weights;
    std::vector<std::uint32_t> order(out.vocab.size());
    out.walks.reserve(order.size() * config.walks_per_node);
    for (std::size_t round = 0; round < config.walks_per_node; ++round) {
        for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
        Rng shuffle_rng(splitmix64(config.seed) ^ (0x5bd1e995ULL * (round + 1)));
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle_rng.below(i)]);
        for (std::uint32_t start : order) {
            const ConceptId& id = out.vocab[start];
            Rng rng(seed_fn ? seed_fn(id, round) : default_walk_seed(config.seed, id, round));
            out.walks.push_back(one_walk(adj, start, config, rng, weights));
        }
    }
    return out;
}

}  // namespace causaforge::embedding
