// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "causaforge/distributions.hpp"
#include "causaforge/errors.hpp"
#include "causaforge/evalstats.hpp"
#include "causaforge/extraction.hpp"
#include "causaforge/hypogen.hpp"
#include "causaforge/io.hpp"
#include "causaforge/pipeline.hpp"
#include "causaforge/provider.hpp"
#include "causaforge/rate_limiter.hpp"
#include "causaforge/tsne.hpp"
#include "support/gradcheck.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace causaforge;

namespace {

const fs::path kSource = CAUSAFORGE_SOURCE_DIR;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

Outcome sample_response() {
    const auto text = io::read_file(kSource / "tests/data/sample_response.txt");
    const auto out = extraction::parse_response(text, "PMC8451848", 0);
    struct Want {
        const char* cause;
        const char* effect;
    };
    const Want want[] = {{"openness to change values", "well-being"},
                         {"cognitive reappraisal", "psychological well-being"}};
    bool ok = out.assertions.size() == 2;
    for (std::size_t i = 0; ok && i < 2; ++i) {
        const auto& a = out.assertions[i];
        ok = a.cause == want[i].cause && a.effect == want[i].effect && a.relationship == Relationship::causality &&
             a.polarity == Polarity::positive;
    }
    return {ok, std::to_string(out.assertions.size()) + " assertions parsed"};
}

// Succeeds except on every 9th call, so retries are charged too.
class FlakyProvider final : public extraction::Provider {
public:
    extraction::ProviderResponse complete(const extraction::ProviderRequest& r) override {
        if (++calls_ % 9 == 0) throw ProviderError("transient");
        return {"ok", r.model_tag, {}};
    }

private:
    std::size_t calls_ = 0;
};

Outcome rate_budget() {
    Rng rng(11);
    std::vector<extraction::ProviderRequest> reqs;
    for (int i = 0; i < 1000; ++i) {
        extraction::ProviderRequest r;
        r.prompt = "p" + std::to_string(i);
        r.token_estimate = 200 + rng.below(6000);
        reqs.push_back(r);
    }
    extraction::RateBudget budget;  // 60 requests, 150k tokens
    extraction::SlidingWindowLimiter limiter(budget);
    extraction::SimulatedClock clock;
    FlakyProvider provider;
    const auto results = extraction::rate_limited_submit(reqs, limiter, provider, clock);
    std::size_t ok = 0;
    for (const auto& r : results) ok += r.ok();

    // Every window [t, t + 60 s) starting at a dispatch instant.
    const auto& log = limiter.log();
    const auto window = std::chrono::seconds(60);
    std::size_t max_req = 0, max_tok = 0;
    for (std::size_t i = 0; i < log.size(); ++i) {
        std::size_t n = 0, tok = 0;
        for (const auto& d : log)
            if (d.at >= log[i].at && d.at < log[i].at + window) ++n, tok += d.tokens;
        max_req = std::max(max_req, n);
        max_tok = std::max(max_tok, tok);
    }
    const bool pass = max_req <= 60 && max_tok <= 150000 && ok == 1000 && log.size() > 1000;
    return {pass, std::to_string(log.size()) + " dispatches; worst window " + std::to_string(max_req) + " requests, " +
                      std::to_string(max_tok) + " tokens"};
}

Outcome link_oracle() {
    std::size_t compared = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto as = oracle::random_assertions(1000 + s, 50);
        const auto g = oracle::build(as);
        std::set<std::string> ids;
        for (const auto& [id, n] : g.nodes()) ids.insert(id);
        const auto table = oracle::random_table(ids, 8, 2000 + s);
        Rng rng(3000 + s);
        const double threshold = -0.3 + 0.6 * rng.uniform();
        const std::size_t k = 1 + rng.below(60);
        std::optional<std::set<std::string>> focus;
        if (s % 2) {
            focus.emplace();
            for (const auto& id : ids)
                if (rng.uniform() < 0.2) focus->insert(id);
            if (focus->empty()) focus->insert(*ids.begin());
        }
        const auto got = linkpred::predict_links(g, table, threshold, focus, k);
        const auto want = oracle::brute_force_links(as, table, threshold, focus, k);
        if (got.size() != want.size()) return {false, "graph " + std::to_string(s) + ": length differs"};
        for (std::size_t i = 0; i < got.size(); ++i)
            if (got[i].a != want[i].a || got[i].b != want[i].b || got[i].cosine != want[i].cosine ||
                got[i].jaccard != want[i].jaccard)
                return {false, "graph " + std::to_string(s) + ": row " + std::to_string(i) + " differs"};
        compared += got.size();
    }
    return {true, "100 graphs, " + std::to_string(compared) + " ranked rows identical"};
}

Outcome bis_interference() {
    graph::CausalGraph g;
    for (const auto& [c, e] : std::vector<std::pair<std::string, std::string>>{
             {"bis", "bas"}, {"bis", "bas reward response"}, {"interference", "bas"},
             {"interference", "bas reward response"}}) {
        CausalAssertion a;
        a.cause = c;
        a.effect = e;
        a.polarity = Polarity::positive;
        a.source_doc = "D";
        g.upsert(a);
    }
    embedding::EmbeddingConfig cfg;
    cfg.seed = 42;
    const auto table = embedding::train_embeddings(embedding::generate_walks(g, cfg), cfg).table;
    const auto ranked = linkpred::predict_links(g, table, linkpred::kDefaultThreshold, std::set<ConceptId>{"bis"}, 10);
    if (ranked.empty()) return {false, "no candidate emitted"};
    const auto& top = ranked.front();
    const bool pass = top.a == "bis" && top.b == "interference" && top.jaccard == 1.0;
    return {pass, "top (" + top.a + ", " + top.b + ") jaccard " + fmt(top.jaccard) + " cosine " + fmt(top.cosine)};
}

Outcome clique_separation() {
    const auto g = oracle::build(oracle::two_cliques(10));
    embedding::EmbeddingConfig cfg;
    cfg.seed = 42;
    const auto table = embedding::train_embeddings(embedding::generate_walks(g, cfg), cfg).table;
    double intra = 0, inter = 0;
    std::size_t ni = 0, nx = 0;
    for (const auto& [a, va] : table.vectors)
        for (const auto& [b, vb] : table.vectors) {
            if (!(a < b)) continue;
            const double c = oracle::cosine(va, vb);
            if (a[0] == b[0])
                intra += c, ++ni;
            else
                inter += c, ++nx;
        }
    intra /= static_cast<double>(ni);
    inter /= static_cast<double>(nx);
    return {intra - inter >= 0.1, "intra " + fmt(intra) + " inter " + fmt(inter) + " gap " + fmt(intra - inter)};
}

Outcome gradient_checks() {
    double sgns = 0, tsne_err = 0;
    for (std::uint64_t s = 0; s < 5; ++s) {
        sgns = std::max(sgns, gradcheck::sgns_max_rel_error(s, 5, 3));
        tsne_err = std::max(tsne_err, gradcheck::tsne_max_rel_error(s, 5));
    }
    return {sgns < 1e-4 && tsne_err < 1e-4, "SGNS " + fmt(sgns) + ", t-SNE " + fmt(tsne_err)};
}

Outcome statistics() {
    using evalstats::one_way_anova;
    const auto a = one_way_anova(std::vector<std::vector<double>>{{1, 2, 3}, {2, 3, 4}, {3, 4, 5}});
    bool ok = std::fabs(a.f - 3.0) < 1e-9 && a.df_between == 2 && a.df_within == 6 &&
              std::fabs(a.r_squared - 0.5) < 1e-9;
    std::string detail = "ANOVA F " + fmt(a.f) + " R2 " + fmt(a.r_squared);

    double worst = 0;
    const std::vector<std::pair<double, double>> dfs{{1, 1}, {1, 5}, {2, 6}, {3, 116}, {5, 20}, {10, 3}, {3, 1652}};
    for (const auto& [d1, d2] : dfs)
        for (double f : {0.05, 0.5, 1.0, 2.0, 3.0, 6.92, 15.0, 40.0})
            worst = std::max(worst, std::fabs(stats::f_upper_tail(f, d1, d2) - oracle::f_tail_quadrature(f, d1, d2)));
    for (double df : {1.0, 2.0, 5.0, 30.0, 58.0, 118.0})
        for (double t : {0.0, 0.3, 1.0, 2.0, 3.34, 4.32, 8.0})
            worst = std::max(worst, std::fabs(stats::t_two_sided(t, df) - oracle::t_two_sided_quadrature(t, df)));
    ok = ok && worst < 1e-8;
    detail += "; tail max diff " + fmt(worst);

    const evalstats::Group ga{"a", {1.2, 2.3, 2.9, 4.1, 3.3}}, gb{"b", {2.2, 3.9, 4.4, 3.1, 5.0, 4.2}};
    const auto an = one_way_anova(std::vector<evalstats::Group>{ga, gb});
    const auto tt = evalstats::pooled_t_test(ga, gb);
    const double ft = std::fabs(an.f - tt.t * tt.t);
    ok = ok && ft < 1e-9;
    detail += "; |F - t^2| " + fmt(ft);

    const std::vector<double> x{1, 2, 3, 4, 5, 6}, up{2, 4, 8, 16, 32, 64}, down{9, 7, 5, 3, 1, -1};
    const double rup = evalstats::spearman_rho(x, up).rho, rdown = evalstats::spearman_rho(x, down).rho;
    ok = ok && rup == 1.0 && rdown == -1.0;
    detail += "; Spearman " + fmt(rup) + "/" + fmt(rdown);
    return {ok, detail};
}

Outcome tsne_scale() {
    Rng rng(120);
    std::vector<std::vector<double>> x;
    for (int c = 0; c < 4; ++c) {
        std::vector<double> center(64);
        for (double& v : center) v = 3.0 * rng.normal();
        for (int i = 0; i < 30; ++i) {
            auto p = center;
            for (double& v : p) v += rng.normal();
            x.push_back(p);
        }
    }
    tsne::TsneConfig cfg;
    cfg.seed = 7;
    const auto r = tsne::tsne_project(x, cfg);
    const std::size_t n = x.size();
    double perp_err = 0;
    for (std::size_t i = 0; i < n; ++i)
        perp_err = std::max(perp_err,
                            std::fabs(tsne::conditional_perplexity(x, i, r.affinities.betas[i]) - cfg.perplexity));
    double asym = 0, sum = 0;
    bool nonneg = true;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            asym = std::max(asym, std::fabs(r.affinities.p[i * n + j] - r.affinities.p[j * n + i]));
            sum += r.affinities.p[i * n + j];
            nonneg = nonneg && r.affinities.p[i * n + j] >= 0;
        }
    const bool pass = r.final_kl <= r.initial_kl && perp_err < 1e-3 && asym <= 1e-12 && std::fabs(sum - 1) <= 1e-12 &&
                      nonneg;
    return {pass, "KL " + fmt(r.initial_kl) + " -> " + fmt(r.final_kl) + "; perplexity err " + fmt(perp_err) +
                      "; |sum P - 1| " + fmt(std::fabs(sum - 1))};
}

std::map<std::string, std::string> run_mini(const fs::path& out) {
    pipeline::PipelineConfig c;
    pipeline::load_ini(c, kSource / "config/mini.ini");
    c.seed = 7;
    c.provider.mock = true;
    c.provider.fixture_dir = kSource / "data/fixtures";
    c.paths.corpus = kSource / "data/mini_corpus.jsonl";
    c.paths.chunks = out / "chunks.jsonl";
    c.paths.assertions = out / "assertions.jsonl";
    c.paths.graph = out / "graph.jsonl";
    c.paths.degree_report = out / "degree_report.tsv";
    c.paths.embeddings = out / "embeddings.tsv";
    c.paths.candidates = out / "candidates.jsonl";
    c.paths.hypotheses = out / "hypotheses.jsonl";
    std::ostringstream log;
    for (auto s : pipeline::generation_stages()) pipeline::execute_stage(s, c, log);
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(out)) files[e.path().filename().string()] = io::read_file(e.path());
    return files;
}

Outcome end_to_end() {
    const auto root = fs::temp_directory_path() / ("causaforge-accept-" + std::to_string(::getpid()));
    fs::remove_all(root);
    const auto first = run_mini(root / "a");
    const auto second = run_mini(root / "b");
    const auto hyps = hypogen::read_hypotheses(root / "a" / "hypotheses.jsonl");
    fs::remove_all(root);
    std::size_t anchored = 0;
    for (const auto& h : hyps) anchored += h.concept_a == "well-being" || h.concept_b == "well-being";
    const bool pass = first == second && first.size() == 7 && anchored >= 1;
    return {pass, std::to_string(first.size()) + " artifacts " + (first == second ? "identical" : "DIFFER") + ", " +
                      std::to_string(anchored) + " focus-anchored hypotheses"};
}

Outcome graph_round_trip() {
    const auto dir = fs::temp_directory_path() / ("causaforge-graph-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto as = oracle::random_assertions(500 + s, 50);
        const auto g = oracle::build(as);
        const auto path = dir / "g.jsonl";
        graph::save_graph(g, path);
        const auto first = io::read_file(path);
        graph::save_graph(graph::load_graph(path), path);
        if (io::read_file(path) != first) return {false, "graph " + std::to_string(s) + " not byte-stable"};
        const auto deg = oracle::in_degrees(as);
        for (std::size_t k : {std::size_t{5}, deg.size()})
            if (graph::degree_ranking(g, k, graph::Direction::in) != oracle::brute_force_ranking(deg, k))
                return {false, "graph " + std::to_string(s) + " degree ranking differs"};
    }
    fs::remove_all(dir);
    return {true, "100 graphs byte-stable; rankings match recount"};
}

}  // namespace

int main() {
    struct Criterion {
        const char* id;
        const char* name;
        double limit_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"C1", "sample extraction response parses to two assertions", 1, sample_response},
        {"C2", "1000-request burst respects 60 req / 150k tokens per 60 s", 5, rate_budget},
        {"C3", "link ranking equals brute-force oracle on 100 random graphs", 30, link_oracle},
        {"C4", "BIS/interference pair ranks first with jaccard 1", 1, bis_interference},
        {"C5", "node2vec separates two bridged 10-cliques by >= 0.1 cosine", 60, clique_separation},
        {"C6", "SGNS and t-SNE gradients match finite differences < 1e-4", 10, gradient_checks},
        {"C7", "ANOVA, F/t tails, F = t^2 and Spearman oracles", 10, statistics},
        {"C8", "t-SNE on 120x64: KL decreases, perplexity, P symmetric and normalized", 60, tsne_scale},
        {"C9", "mini-corpus pipeline is byte-deterministic with a focus hypothesis", 120, end_to_end},
        {"C10", "graph save/load/save byte-stable; degree ranking matches recount", 10, graph_round_trip},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.limit_seconds) {
            o.pass = false;
            o.detail += "; over time limit";
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << c.id << "  " << c.name << "  [" << o.detail << "; " << fmt(secs)
                  << " s]" << std::endl;
    }
    std::cout << (failures ? "FAILED " : "ALL PASSED ") << criteria.size() - failures << "/" << criteria.size()
              << std::endl;
    return failures;
}
