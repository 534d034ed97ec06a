#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "causaforge/graph.hpp"

namespace causaforge::embedding {

struct EmbeddingConfig {
    std::size_t dims = 128;
    std::size_t walk_length = 80;
    std::size_t walks_per_node = 10;
    double return_param_p = 1.0;
    double inout_param_q = 1.0;
    std::size_t window = 10;
    std::size_t negatives_per_positive = 5;
    std::size_t epochs = 5;
    double initial_learning_rate = 0.025;
    std::uint64_t seed = 0;
    bool directed_walks = false;  // default walks the undirected neighbor view

    void validate() const;
};

// Walks over integer node indices; `vocab[i]` names node i (sorted ids).
struct WalkSet {
    std::vector<ConceptId> vocab;
    std::vector<std::vector<std::uint32_t>> walks;

    std::vector<std::vector<ConceptId>> as_ids() const;
};

// Seed for walk number `walk` started at `start`. The default mixes the
// config seed with an FNV-1a hash of the concept id.
using WalkSeedFn = std::function<std::uint64_t(const ConceptId& start, std::size_t walk)>;

std::uint64_t default_walk_seed(std::uint64_t seed, const ConceptId& start, std::size_t walk);

// node2vec second-order walks. Rounds are emitted in order; within a round
// start nodes follow sorted id order.
WalkSet generate_walks(const graph::CausalGraph& g, const EmbeddingConfig& config, const WalkSeedFn& seed_fn = {});

struct EmbeddingTable {
    std::size_t dims = 0;
    std::map<ConceptId, std::vector<double>> vectors;

    const std::vector<double>& at(const ConceptId& id) const;
};

struct TrainingResult {
    EmbeddingTable table;
    std::vector<double> epoch_mean_loss;  // SGNS loss per pair, averaged per epoch
};

TrainingResult train_embeddings(const WalkSet& walks, const EmbeddingConfig& config);

// Loss and gradient of one skip-gram pair with its negatives:
//   L = -log s(u_o . v_c) - sum_n log s(-u_n . v_c)
// Gradients are written to the output spans (same shapes as the inputs).
double sgns_pair_gradient(std::span<const double> center, std::span<const double> context,
                          std::span<const std::span<const double>> negatives, std::span<double> grad_center,
                          std::span<double> grad_context, std::span<const std::span<double>> grad_negatives);

double sgns_pair_loss(std::span<const double> center, std::span<const double> context,
                      std::span<const std::span<const double>> negatives);

// Throws ZeroVector / DimensionMismatch.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

inline constexpr const char* kEmbeddingFormat = "causaforge-embeddings v1";

std::string serialize_table(const EmbeddingTable& table);
EmbeddingTable parse_table(const std::vector<std::string>& lines);
void save_table(const EmbeddingTable& table, const std::filesystem::path& path);
EmbeddingTable load_table(const std::filesystem::path& path);

}  // namespace causaforge::embedding
