#include <ostream>

#include "causaforge/embed_client.hpp"
#include "causaforge/errors.hpp"
#include "causaforge/extraction.hpp"
#include "causaforge/graph.hpp"
#include "causaforge/hypogen.hpp"
#include "causaforge/io.hpp"
#include "causaforge/linkpred.hpp"
#include "causaforge/pipeline.hpp"
#include "causaforge/provider.hpp"
#include "causaforge/text.hpp"

namespace causaforge::pipeline {

namespace fs = std::filesystem;

namespace {

// Simulated runs start their clock at 2024-01-01T00:00:00Z.
constexpr std::int64_t kMockEpoch = 1704067200;

void require(const fs::path& path) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) throw MissingPrerequisite("missing input " + path.string());
}

std::uint64_t require_seed(const PipelineConfig& c) {
    if (!c.seed) throw ConfigError("global.seed is required");
    return *c.seed;
}

void ensure_parent(const fs::path& path) {
    if (!path.has_parent_path()) return;
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoFailure("cannot create " + path.parent_path().string() + ": " + ec.message());
}

void write_artifact(const fs::path& path, const std::string& contents) {
    ensure_parent(path);
    io::write_atomic(path, contents);
}

// Clock, limiter and provider for one provider-backed stage.
struct ProviderSession {
    std::unique_ptr<extraction::Clock> clock;
    std::unique_ptr<extraction::Provider> provider;
    extraction::SlidingWindowLimiter limiter;
    extraction::RetryPolicy retry;
    bool simulated = false;

    ProviderSession(const PipelineConfig& c, const fs::path& fixture_subdir, extraction::MockProvider::Fallback fallback)
        : limiter(c.budget) {
        c.budget.validate();
        if (c.provider.max_retries < 0) throw ConfigError("provider.max_retries must be >= 0");
        if (c.provider.base_delay_ms < 0) throw ConfigError("provider.base_delay_ms must be >= 0");
        retry.max_retries = c.provider.max_retries;
        retry.base_delay = std::chrono::milliseconds(c.provider.base_delay_ms);
        retry.seed = require_seed(c);
        if (c.provider.mock) {
            simulated = true;
            clock = std::make_unique<extraction::SimulatedClock>();
            provider = std::make_unique<extraction::MockProvider>(c.provider.fixture_dir / fixture_subdir,
                                                                  std::move(fallback));
        } else {
            clock = std::make_unique<extraction::SteadyClock>();
            const char* key = std::getenv(extraction::kApiKeyEnv);
            provider = std::make_unique<extraction::HttpChatProvider>(
                c.provider.endpoint, key ? key : "", std::chrono::seconds(c.provider.timeout_seconds));
        }
    }
};

void run_ingest(const PipelineConfig& c, std::ostream& log) {
    require(c.paths.corpus);
    c.filter.validate();
    if (c.max_tokens == 0) throw ConfigError("chunking.max_tokens must be positive");
    const auto docs = corpus::read_corpus(c.paths.corpus);
    const auto kept = corpus::filter_documents(docs, c.filter);
    std::vector<corpus::TextChunk> chunks;
    for (const auto& d : kept) {
        std::string text = d.abstract;
        const std::string body = corpus::strip_references(d.body_text);
        if (!text.empty() && !body.empty()) text += "\n\n";
        text += body;
        for (auto& ch : corpus::chunk_text(text, c.max_tokens, d.doc_id)) chunks.push_back(std::move(ch));
    }
    write_artifact(c.paths.chunks, corpus::chunks_to_jsonl(chunks));
    log << "ingest: " << kept.size() << "/" << docs.size() << " documents kept, " << chunks.size() << " chunks\n";
}

[[noreturn]] void fail_exhausted(const std::string& what, std::size_t failed, const std::string& first_error) {
    throw ProviderExhausted(what + ": " + std::to_string(failed) + " request(s) failed; first: " + first_error);
}

void run_extract(const PipelineConfig& c, std::ostream& log) {
    require(c.paths.chunks);
    const auto chunks = corpus::read_chunks(c.paths.chunks);
    ProviderSession session(c, "extraction", {});

    std::vector<extraction::ProviderRequest> requests;
    for (const auto& ch : chunks)
        requests.push_back(extraction::make_request(extraction::build_extraction_prompt(ch), c.provider.model_tag));
    const auto results =
        extraction::rate_limited_submit(requests, session.limiter, *session.provider, *session.clock, session.retry);

    std::size_t failed = 0;
    std::string first_error;
    for (const auto& r : results)
        if (!r.ok() && failed++ == 0) first_error = r.error;
    if (failed) fail_exhausted("extract", failed, first_error);

    std::vector<CausalAssertion> assertions;
    std::vector<std::size_t> origin;  // chunk index into `chunks` per assertion
    std::size_t rejected = 0;
    std::size_t unparsed = 0;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        try {
            auto outcome = extraction::parse_response(results[i].response->raw_text, chunks[i].doc_id, chunks[i].index);
            rejected += outcome.rejections.size() + outcome.skipped;
            for (auto& a : outcome.assertions) {
                assertions.push_back(std::move(a));
                origin.push_back(i);
            }
        } catch (const ParseFailure& e) {
            ++unparsed;
            log << "extract: " << chunks[i].doc_id << " part " << chunks[i].index << ": " << e.what() << "\n";
        }
    }

    if (c.provider.verify && !assertions.empty()) {
        std::vector<extraction::ProviderRequest> checks;
        for (std::size_t k = 0; k < assertions.size(); ++k)
            checks.push_back(extraction::make_request(
                extraction::build_verification_prompt(assertions[k], chunks[origin[k]]), c.provider.model_tag));
        const auto verdicts =
            extraction::rate_limited_submit(checks, session.limiter, *session.provider, *session.clock, session.retry);
        std::vector<CausalAssertion> kept;
        for (std::size_t k = 0; k < assertions.size(); ++k) {
            if (!verdicts[k].ok()) fail_exhausted("verify", 1, verdicts[k].error);
            const auto v = extraction::parse_verdict(verdicts[k].response->raw_text);
            if (!v) {
                log << "verify: unreadable verdict kept assertion " << assertions[k].cause << " -> "
                    << assertions[k].effect << "\n";
                kept.push_back(assertions[k]);
            } else if (auto a = extraction::apply_verdict(assertions[k], *v)) {
                kept.push_back(std::move(*a));
            }
        }
        log << "verify: " << kept.size() << "/" << assertions.size() << " assertions kept\n";
        assertions = std::move(kept);
    }

    write_artifact(c.paths.assertions, extraction::assertions_to_jsonl(assertions));
    log << "extract: " << chunks.size() << " chunks, " << assertions.size() << " assertions, " << rejected
        << " rejected, " << unparsed << " unparseable responses\n";
}

void run_build_graph(const PipelineConfig& c, std::ostream& log) {
    require(c.paths.assertions);
    graph::CausalGraph g;
    for (const auto& a : extraction::read_assertions(c.paths.assertions)) g.upsert(a);
    ensure_parent(c.paths.graph);
    graph::save_graph(g, c.paths.graph);
    const auto ranking = graph::degree_ranking(g, c.degree_top_k, graph::Direction::in);
    write_artifact(c.paths.degree_report, graph::format_degree_report(ranking, graph::Direction::in));
    log << "build-graph: " << g.node_count() << " concepts, " << g.edge_count() << " edges\n";
}

void run_embed(const PipelineConfig& c, std::ostream& log) {
    require(c.paths.graph);
    const auto g = graph::load_graph(c.paths.graph);
    auto cfg = c.embedding;
    cfg.seed = require_seed(c);
    const auto walks = embedding::generate_walks(g, cfg);
    const auto trained = embedding::train_embeddings(walks, cfg);
    ensure_parent(c.paths.embeddings);
    embedding::save_table(trained.table, c.paths.embeddings);
    log << "embed: " << walks.walks.size() << " walks, " << trained.table.vectors.size() << " vectors";
    if (!trained.epoch_mean_loss.empty()) log << ", final loss " << io::format_double(trained.epoch_mean_loss.back());
    log << "\n";
}

void run_predict(const PipelineConfig& c, std::ostream& log) {
    require(c.paths.graph);
    require(c.paths.embeddings);
    const auto g = graph::load_graph(c.paths.graph);
    const auto table = embedding::load_table(c.paths.embeddings);
    std::optional<std::set<ConceptId>> focus;
    if (!c.predict.focus.empty()) {
        focus.emplace();
        for (const auto& f : c.predict.focus) focus->insert(text::normalize_concept(f));
    }
    const auto ranked = linkpred::predict_links(g, table, c.predict.threshold, focus, c.predict.top_k);
    write_artifact(c.paths.candidates, linkpred::candidates_to_jsonl(ranked));
    log << "predict: " << ranked.size() << " ranked candidates\n";
}

void run_generate(const PipelineConfig& c, std::ostream& log) {
    require(c.paths.graph);
    require(c.paths.candidates);
    const auto g = graph::load_graph(c.paths.graph);
    const auto ranked = linkpred::read_candidates(c.paths.candidates);
    std::vector<linkpred::CandidatePair> pairs;
    if (c.generate.focus.empty()) {
        pairs.assign(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(std::min(c.generate.cap, ranked.size())));
    } else {
        pairs = hypogen::select_focus_pairs(ranked, text::normalize_concept(c.generate.focus), c.generate.cap);
    }

    ProviderSession session(c, "hypotheses",
                            [](const extraction::ProviderRequest& r) { return hypogen::mock_statement(r.prompt); });
    hypogen::GenerationOptions options;
    options.model_tag = c.provider.model_tag;
    options.retry = session.retry;
    if (session.simulated) {
        options.timestamp = [](extraction::TimePoint t) {
            const auto s = std::chrono::duration_cast<std::chrono::seconds>(t.time_since_epoch()).count();
            return hypogen::iso8601_utc(kMockEpoch + s);
        };
    }
    const auto result =
        hypogen::generate_hypotheses(pairs, g, *session.provider, session.limiter, *session.clock, options);
    for (const auto& f : result.failures) log << "generate: " << f.concept_a << " / " << f.concept_b << ": " << f.error << "\n";
    if (result.hypotheses.empty() && !result.failures.empty())
        fail_exhausted("generate", result.failures.size(), result.failures.front().error);
    write_artifact(c.paths.hypotheses, hypogen::hypotheses_to_jsonl(result.hypotheses));
    log << "generate: " << result.hypotheses.size() << " hypotheses from " << pairs.size() << " pairs\n";
}

void run_evaluate(const PipelineConfig& c, std::ostream& log) {
    require(c.paths.ratings);
    require(c.paths.vectors);
    const auto settings = evaluation_settings(c);
    require_seed(c);
    const auto groups = c.evaluate.groups.empty() ? evalstats::kDefaultGroups : c.evaluate.groups;
    const auto ratings = evalstats::load_ratings(c.paths.ratings, groups);
    const auto table = embedding::load_table(c.paths.vectors);
    const auto artifacts = evalstats::evaluate(ratings, table.vectors, settings);
    evalstats::write_artifacts(artifacts, c.paths.report);
    log << "evaluate: " << ratings.hypotheses.size() << " hypotheses, " << ratings.reviewers.size()
        << " reviewers, report in " << c.paths.report.string() << "\n";
}

void run_vectorize(const PipelineConfig& c, std::ostream& log) {
    require(c.paths.hypotheses);
    const auto hypotheses = hypogen::read_hypotheses(c.paths.hypotheses);
    if (hypotheses.empty()) throw InsufficientData("no hypotheses to vectorize");
    std::vector<std::string> texts;
    for (const auto& h : hypotheses) texts.push_back(h.statement);
    evalstats::EmbedClient client(c.sidecar_url, std::chrono::seconds(c.provider.timeout_seconds));
    const auto response = client.embed(texts);
    embedding::EmbeddingTable table;
    table.dims = response.dims;
    for (std::size_t i = 0; i < hypotheses.size(); ++i) table.vectors[hypotheses[i].id] = response.vectors[i];
    ensure_parent(c.paths.vectors);
    embedding::save_table(table, c.paths.vectors);
    log << "vectorize: " << table.vectors.size() << " vectors from " << response.model << "\n";
}

}  // namespace

std::string_view to_string(Stage s) {
    switch (s) {
        case Stage::ingest: return "ingest";
        case Stage::extract: return "extract";
        case Stage::build_graph: return "build-graph";
        case Stage::embed: return "embed";
        case Stage::predict: return "predict";
        case Stage::generate: return "generate";
        case Stage::evaluate: return "evaluate";
        case Stage::vectorize: break;
    }
    return "vectorize";
}

std::optional<Stage> parse_stage(std::string_view s) {
    for (Stage st : {Stage::ingest, Stage::extract, Stage::build_graph, Stage::embed, Stage::predict, Stage::generate,
                     Stage::evaluate, Stage::vectorize})
        if (to_string(st) == s) return st;
    return std::nullopt;
}

const std::vector<Stage>& generation_stages() {
    static const std::vector<Stage> stages{Stage::ingest, Stage::extract, Stage::build_graph,
                                           Stage::embed,  Stage::predict, Stage::generate};
    return stages;
}

void execute_stage(Stage stage, const PipelineConfig& config, std::ostream& log) {
    require_seed(config);
    switch (stage) {
        case Stage::ingest: return run_ingest(config, log);
        case Stage::extract: return run_extract(config, log);
        case Stage::build_graph: return run_build_graph(config, log);
        case Stage::embed: return run_embed(config, log);
        case Stage::predict: return run_predict(config, log);
        case Stage::generate: return run_generate(config, log);
        case Stage::evaluate: return run_evaluate(config, log);
        case Stage::vectorize: return run_vectorize(config, log);
    }
}

std::string extraction_fixture_keys(const PipelineConfig& config) {
    require(config.paths.chunks);
    std::string out;
    for (const auto& ch : corpus::read_chunks(config.paths.chunks)) {
        out += extraction::MockProvider::fixture_key(extraction::build_extraction_prompt(ch));
        out += "\t" + ch.doc_id + "#" + std::to_string(ch.index) + "\n";
    }
    return out;
}

}  // namespace causaforge::pipeline
