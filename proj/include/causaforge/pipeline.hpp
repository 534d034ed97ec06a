#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "causaforge/corpus.hpp"
#include "causaforge/embedding.hpp"
#include "causaforge/rate_limiter.hpp"
#include "causaforge/report.hpp"

namespace causaforge::pipeline {

struct PipelineConfig {
    struct Paths {
        std::filesystem::path corpus = "data/mini_corpus.jsonl";
        std::filesystem::path chunks = "out/chunks.jsonl";
        std::filesystem::path assertions = "out/assertions.jsonl";
        std::filesystem::path graph = "out/graph.jsonl";
        std::filesystem::path degree_report = "out/degree_report.tsv";
        std::filesystem::path embeddings = "out/embeddings.tsv";
        std::filesystem::path candidates = "out/candidates.jsonl";
        std::filesystem::path hypotheses = "out/hypotheses.jsonl";
        std::filesystem::path ratings = "data/ratings.csv";
        std::filesystem::path vectors = "data/hypothesis_vectors.tsv";
        std::filesystem::path report = "out/report";
    } paths;

    corpus::FilterCriteria filter;
    std::size_t max_tokens = corpus::kDefaultMaxTokens;

    struct Provider {
        std::string endpoint = "https://api.openai.com/v1/chat/completions";
        std::string model_tag = "gpt-4";
        bool mock = false;
        std::filesystem::path fixture_dir = "data/fixtures";
        bool verify = false;
        int timeout_seconds = 120;
        int max_retries = 3;
        int base_delay_ms = 1000;
    } provider;

    extraction::RateBudget budget;
    embedding::EmbeddingConfig embedding;

    struct Predict {
        double threshold = 0.5;
        std::size_t top_k = 1000;
        std::vector<std::string> focus;  // empty: scan all pairs
    } predict;

    struct Generate {
        std::string focus;  // empty: every ranked candidate up to the cap
        std::size_t cap = 130;
    } generate;

    std::size_t degree_top_k = 20;
    std::string sidecar_url = "http://127.0.0.1:8765";

    struct Evaluate {
        std::size_t bonferroni_family = 0;  // 0: all pairs
        std::size_t curve_window = 2;
        std::string ablation_a;
        std::string ablation_b;
        std::vector<std::string> groups;  // empty: the four default arms
        tsne::TsneConfig tsne;
    } evaluate;

    std::optional<std::uint64_t> seed;
};

// One settable key, "section.key", shared by the INI loader and CLI flags.
struct ConfigKey {
    std::string name;
    std::string help;
    std::function<void(PipelineConfig&, const std::string&)> set;
    std::function<std::string(const PipelineConfig&)> get;
};

const std::vector<ConfigKey>& config_keys();

// Throws ConfigError for unknown keys and malformed values.
void set_config_value(PipelineConfig& config, const std::string& key, const std::string& value);
void load_ini(PipelineConfig& config, const std::filesystem::path& path);

// Settings the stages consume, derived from the config and seed.
evalstats::EvaluationSettings evaluation_settings(const PipelineConfig& config);

enum class Stage { ingest, extract, build_graph, embed, predict, generate, evaluate, vectorize };

std::string_view to_string(Stage s);
std::optional<Stage> parse_stage(std::string_view s);

// Stages in pipeline order, ingest through generate.
const std::vector<Stage>& generation_stages();

// Runs one stage. Progress lines go to `log`. Throws MissingPrerequisite when
// an input artifact is absent, ConfigError when the seed is unset, and
// ProviderError / ProviderExhausted on provider failure.
void execute_stage(Stage stage, const PipelineConfig& config, std::ostream& log);

// Extraction fixture keys for every chunk prompt, one "<sha256>\t<doc>#<index>" per line.
std::string extraction_fixture_keys(const PipelineConfig& config);

}  // namespace causaforge::pipeline
