#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>

#include "causaforge/errors.hpp"
#include "causaforge/io.hpp"
#include "causaforge/pipeline.hpp"
#include "causaforge/text.hpp"

namespace causaforge::pipeline {

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& raw) {
    const std::string v = text::trim(raw);
    T out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
        throw ConfigError(key + ": expected a number, got '" + raw + "'");
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(out)) throw ConfigError(key + ": value must be finite");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& raw) {
    const std::string v = text::to_lower(text::trim(raw));
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key + ": expected true or false, got '" + raw + "'");
}

std::vector<std::string> parse_list(const std::string& raw) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= raw.size()) {
        const auto comma = raw.find(',', start);
        const auto item = text::trim(raw.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += ",";
        out += s;
    }
    return out;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

#define PATH_KEY(field, help)                                                                        \
    ConfigKey {                                                                                      \
        "paths." #field, help, [](PipelineConfig& c, const std::string& v) { c.paths.field = v; },  \
            [](const PipelineConfig& c) { return c.paths.field.string(); }                           \
    }

#define NUM_KEY(name, type, member, help)                                                                  \
    ConfigKey {                                                                                            \
        name, help, [](PipelineConfig& c, const std::string& v) { c.member = parse_number<type>(name, v); }, \
            [](const PipelineConfig& c) -> std::string {                                                   \
                if constexpr (std::is_floating_point_v<type>)                                              \
                    return io::format_double(c.member);                                                    \
                else                                                                                       \
                    return std::to_string(c.member);                                                       \
            }                                                                                              \
    }

#define STR_KEY(name, member, help)                                                              \
    ConfigKey {                                                                                  \
        name, help, [](PipelineConfig& c, const std::string& v) { c.member = text::trim(v); }, \
            [](const PipelineConfig& c) { return std::string(c.member); }                        \
    }

#define BOOL_KEY(name, member, help)                                                                \
    ConfigKey {                                                                                     \
        name, help, [](PipelineConfig& c, const std::string& v) { c.member = parse_bool(name, v); }, \
            [](const PipelineConfig& c) { return bool_str(c.member); }                              \
    }

#define LIST_KEY(name, member, help)                                                            \
    ConfigKey {                                                                                 \
        name, help, [](PipelineConfig& c, const std::string& v) { c.member = parse_list(v); }, \
            [](const PipelineConfig& c) { return join(c.member); }                              \
    }

std::vector<ConfigKey> make_keys() {
    return {
        ConfigKey{"global.seed", "global seed; required by every stage",
                  [](PipelineConfig& c, const std::string& v) { c.seed = parse_number<std::uint64_t>("global.seed", v); },
                  [](const PipelineConfig& c) { return c.seed ? std::to_string(*c.seed) : std::string(); }},
        PATH_KEY(corpus, "input corpus (JSON Lines)"),
        PATH_KEY(chunks, "ingest output"),
        PATH_KEY(assertions, "extract output"),
        PATH_KEY(graph, "build-graph output"),
        PATH_KEY(degree_report, "build-graph degree ranking"),
        PATH_KEY(embeddings, "embed output"),
        PATH_KEY(candidates, "predict output"),
        PATH_KEY(hypotheses, "generate output"),
        PATH_KEY(ratings, "evaluate input: ratings CSV"),
        PATH_KEY(vectors, "evaluate input: hypothesis vectors; vectorize output"),
        PATH_KEY(report, "evaluate output directory"),
        LIST_KEY("filter.keywords", filter.keywords, "comma-separated keywords (empty: keep all)"),
        ConfigKey{"filter.journal_term", "term the journal name must contain",
                  [](PipelineConfig& c, const std::string& v) {
                      const auto t = text::trim(v);
                      if (t.empty())
                          c.filter.journal_required_term.reset();
                      else
                          c.filter.journal_required_term = t;
                  },
                  [](const PipelineConfig& c) { return c.filter.journal_required_term.value_or(""); }},
        NUM_KEY("chunking.max_tokens", std::size_t, max_tokens, "chunk budget in estimated tokens"),
        STR_KEY("provider.endpoint", provider.endpoint, "chat-completions URL"),
        STR_KEY("provider.model", provider.model_tag, "model tag sent to the provider"),
        BOOL_KEY("provider.mock", provider.mock, "serve responses from fixtures instead of HTTP"),
        ConfigKey{"provider.fixture_dir", "fixture root (extraction/ and hypotheses/ inside)",
                  [](PipelineConfig& c, const std::string& v) { c.provider.fixture_dir = text::trim(v); },
                  [](const PipelineConfig& c) { return c.provider.fixture_dir.string(); }},
        BOOL_KEY("provider.verify", provider.verify, "run the verification pass on extracted assertions"),
        NUM_KEY("provider.timeout_seconds", int, provider.timeout_seconds, "HTTP timeout"),
        NUM_KEY("provider.max_retries", int, provider.max_retries, "retries after the first attempt"),
        NUM_KEY("provider.base_delay_ms", int, provider.base_delay_ms, "first backoff delay"),
        NUM_KEY("rate.requests_per_minute", std::size_t, budget.max_requests_per_minute, "request budget"),
        NUM_KEY("rate.tokens_per_minute", std::size_t, budget.max_tokens_per_minute, "token budget"),
        NUM_KEY("embedding.dims", std::size_t, embedding.dims, "vector size"),
        NUM_KEY("embedding.walk_length", std::size_t, embedding.walk_length, "nodes per walk"),
        NUM_KEY("embedding.walks_per_node", std::size_t, embedding.walks_per_node, "walks started per node"),
        NUM_KEY("embedding.p", double, embedding.return_param_p, "node2vec return parameter"),
        NUM_KEY("embedding.q", double, embedding.inout_param_q, "node2vec in-out parameter"),
        NUM_KEY("embedding.window", std::size_t, embedding.window, "skip-gram context window"),
        NUM_KEY("embedding.negatives", std::size_t, embedding.negatives_per_positive, "negative samples per pair"),
        NUM_KEY("embedding.epochs", std::size_t, embedding.epochs, "training epochs"),
        NUM_KEY("embedding.learning_rate", double, embedding.initial_learning_rate, "initial SGD step"),
        BOOL_KEY("embedding.directed_walks", embedding.directed_walks, "follow edge direction in walks"),
        NUM_KEY("predict.threshold", double, predict.threshold, "cosine gate"),
        NUM_KEY("predict.top_k", std::size_t, predict.top_k, "ranked candidates kept"),
        LIST_KEY("predict.focus", predict.focus, "comma-separated focus concepts (empty: all pairs)"),
        STR_KEY("generate.focus", generate.focus, "concept every generated pair must contain"),
        NUM_KEY("generate.cap", std::size_t, generate.cap, "maximum hypotheses"),
        NUM_KEY("report.degree_top_k", std::size_t, degree_top_k, "rows in the degree report"),
        STR_KEY("sidecar.url", sidecar_url, "embedding service base URL"),
        NUM_KEY("evaluate.bonferroni_family", std::size_t, evaluate.bonferroni_family, "family size (0: all pairs)"),
        NUM_KEY("evaluate.curve_window", std::size_t, evaluate.curve_window, "moving-average window"),
        STR_KEY("evaluate.ablation_a", evaluate.ablation_a, "first ablation group"),
        STR_KEY("evaluate.ablation_b", evaluate.ablation_b, "second ablation group"),
        LIST_KEY("evaluate.groups", evaluate.groups, "declared group labels"),
        NUM_KEY("tsne.perplexity", double, evaluate.tsne.perplexity, "target perplexity"),
        NUM_KEY("tsne.iterations", std::size_t, evaluate.tsne.iterations, "gradient steps"),
        NUM_KEY("tsne.learning_rate", double, evaluate.tsne.learning_rate, "gradient step size"),
        NUM_KEY("tsne.exaggeration", double, evaluate.tsne.exaggeration, "early exaggeration factor"),
        NUM_KEY("tsne.exaggeration_iterations", std::size_t, evaluate.tsne.exaggeration_iterations,
                "iterations with exaggeration"),
    };
}

#undef PATH_KEY
#undef NUM_KEY
#undef STR_KEY
#undef BOOL_KEY
#undef LIST_KEY

}  // namespace

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = make_keys();
    return keys;
}

void set_config_value(PipelineConfig& config, const std::string& key, const std::string& value) {
    for (const auto& k : config_keys()) {
        if (k.name == key) {
            k.set(config, value);
            return;
        }
    }
    throw ConfigError("unknown config key '" + key + "'");
}

void load_ini(PipelineConfig& config, const std::filesystem::path& path) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(e.what());
    }
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError(path.string() + ": key '" + section + "' outside a section");
        for (const auto& [key, value] : body) set_config_value(config, section + "." + key, value.data());
    }
}

evalstats::EvaluationSettings evaluation_settings(const PipelineConfig& config) {
    evalstats::EvaluationSettings s;
    if (config.evaluate.bonferroni_family > 0) s.bonferroni_family = config.evaluate.bonferroni_family;
    s.curve_window = config.evaluate.curve_window;
    s.tsne = config.evaluate.tsne;
    s.tsne.seed = config.seed.value_or(0);
    const bool a = !config.evaluate.ablation_a.empty();
    const bool b = !config.evaluate.ablation_b.empty();
    if (a != b) throw ConfigError("evaluate.ablation_a and evaluate.ablation_b must be set together");
    if (a) s.ablation = std::make_pair(config.evaluate.ablation_a, config.evaluate.ablation_b);
    return s;
}

}  // namespace causaforge::pipeline
