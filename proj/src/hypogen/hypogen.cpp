#include "causaforge/hypogen.hpp"

#include <chrono>
#include <ctime>
#include <json.hpp>
#include <set>

#include "causaforge/errors.hpp"
#include "causaforge/hash.hpp"
#include "causaforge/io.hpp"

namespace causaforge::hypogen {

using nlohmann::json;

std::vector<linkpred::CandidatePair> select_focus_pairs(const std::vector<linkpred::CandidatePair>& ranked,
                                                        const ConceptId& focus, std::size_t cap) {
    std::vector<linkpred::CandidatePair> out;
    for (const auto& p : ranked) {
        if (out.size() >= cap) break;
        if (p.a == focus || p.b == focus) out.push_back(p);
    }
    return out;
}

std::vector<ConceptId> shared_neighbors(const graph::CausalGraph& g, const ConceptId& a, const ConceptId& b) {
    const auto na = g.neighbor_set(a, graph::Direction::undirected);
    const auto nb = g.neighbor_set(b, graph::Direction::undirected);
    std::vector<ConceptId> out;
    for (const auto& x : na) {
        if (out.size() == kMaxContextConcepts) break;
        if (x != a && x != b && nb.count(x)) out.push_back(x);
    }
    return out;
}

const std::string_view kHypothesisTemplate =
    "You are assisting researchers in psychology who are looking for new research hypotheses.\n"
    "\n"
    "Concept 1: {concept_a}\n"
    "Concept 2: {concept_b}\n"
    "\n"
    "A causal knowledge graph built from published articles has no direct link between these two concepts, "
    "but their positions in the graph suggest that they are related.{context}\n"
    "\n"
    "Write one novel, testable hypothesis stating a causal relationship between Concept 1 and Concept 2. "
    "Reply with the hypothesis only.";

namespace {

void replace_all(std::string& s, std::string_view from, std::string_view to) {
    for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
        s.replace(pos, from.size(), to);
}

std::optional<std::string> line_value(std::string_view prompt, std::string_view label) {
    std::size_t pos = 0;
    while (pos < prompt.size()) {
        std::size_t end = prompt.find('\n', pos);
        if (end == std::string_view::npos) end = prompt.size();
        const std::string_view line = prompt.substr(pos, end - pos);
        if (line.substr(0, label.size()) == label) return std::string(line.substr(label.size()));
        pos = end + 1;
    }
    return std::nullopt;
}

}  // namespace

std::string build_hypothesis_prompt(const linkpred::CandidatePair& pair, const std::vector<ConceptId>& context) {
    std::string prompt(kHypothesisTemplate);
    std::string ctx;
    if (!context.empty()) {
        ctx = "\n\nConcepts linked to both in the graph: ";
        for (std::size_t i = 0; i < context.size() && i < kMaxContextConcepts; ++i) {
            if (i) ctx += "; ";
            ctx += context[i];
        }
        ctx += ".";
    }
    // Context first: concept names are data and may contain brace text.
    replace_all(prompt, "{context}", ctx);
    const auto first = prompt.find("{concept_a}");
    prompt.replace(first, 11, pair.a);
    const auto second = prompt.find("{concept_b}", first + pair.a.size());
    prompt.replace(second, 11, pair.b);
    return prompt;
}

std::optional<std::pair<ConceptId, ConceptId>> concepts_in_prompt(std::string_view prompt) {
    auto a = line_value(prompt, "Concept 1: ");
    auto b = line_value(prompt, "Concept 2: ");
    if (!a || !b) return std::nullopt;
    return std::make_pair(std::move(*a), std::move(*b));
}

std::string mock_statement(std::string_view prompt) {
    const auto concepts = concepts_in_prompt(prompt);
    if (!concepts) return "Mock hypothesis " + sha256_hex(prompt).substr(0, 12) + ".";
    return "Mock hypothesis: changes in " + concepts->first + " causally influence " + concepts->second + ".";
}

std::string hypothesis_id(const ConceptId& a, const ConceptId& b) {
    return "H-" + sha256_hex(a + "\n" + b).substr(0, 12);
}

std::string iso8601_utc(std::int64_t unix_seconds) {
    const std::time_t t = static_cast<std::time_t>(unix_seconds);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

GenerationResult generate_hypotheses(const std::vector<linkpred::CandidatePair>& pairs, const graph::CausalGraph& g,
                                     extraction::Provider& provider, extraction::SlidingWindowLimiter& limiter,
                                     extraction::Clock& clock, const GenerationOptions& options) {
    std::vector<linkpred::CandidatePair> unique;
    std::set<std::pair<ConceptId, ConceptId>> seen;
    for (const auto& p : pairs)
        if (seen.emplace(p.a, p.b).second) unique.push_back(p);

    std::vector<extraction::ProviderRequest> requests;
    requests.reserve(unique.size());
    for (const auto& p : unique)
        requests.push_back(
            extraction::make_request(build_hypothesis_prompt(p, shared_neighbors(g, p.a, p.b)), options.model_tag));

    const auto results = extraction::rate_limited_submit(requests, limiter, provider, clock, options.retry);

    GenerationResult out;
    for (std::size_t i = 0; i < unique.size(); ++i) {
        const auto& p = unique[i];
        const auto& r = results[i];
        if (!r.ok()) {
            out.failures.push_back({p.a, p.b, r.error});
            continue;
        }
        if (r.response->raw_text.empty()) {
            out.failures.push_back({p.a, p.b, "provider returned an empty statement"});
            continue;
        }
        Hypothesis h;
        h.id = hypothesis_id(p.a, p.b);
        h.concept_a = p.a;
        h.concept_b = p.b;
        h.statement = r.response->raw_text;
        h.cosine = p.cosine;
        h.jaccard = p.jaccard;
        h.provider_tag = r.response->model_tag;
        if (options.timestamp) {
            h.created_at = options.timestamp(r.dispatched_at);
        } else {
            const auto now = std::chrono::system_clock::now();
            h.created_at = iso8601_utc(std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count());
        }
        out.hypotheses.push_back(std::move(h));
    }
    return out;
}

std::string hypotheses_to_jsonl(const std::vector<Hypothesis>& hypotheses) {
    std::string out;
    for (const auto& h : hypotheses) {
        json j = {{"id", h.id},
                  {"concept_a", h.concept_a},
                  {"concept_b", h.concept_b},
                  {"statement", h.statement},
                  {"cosine", h.cosine},
                  {"jaccard", h.jaccard},
                  {"provider_tag", h.provider_tag},
                  {"created_at", h.created_at}};
        out += j.dump() + "\n";
    }
    return out;
}

std::vector<Hypothesis> read_hypotheses(const std::filesystem::path& path) {
    const auto lines = io::read_lines(path);
    std::vector<Hypothesis> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        try {
            const json j = json::parse(lines[i]);
            Hypothesis h;
            h.id = j.at("id").get<std::string>();
            h.concept_a = j.at("concept_a").get<std::string>();
            h.concept_b = j.at("concept_b").get<std::string>();
            h.statement = j.at("statement").get<std::string>();
            h.cosine = j.value("cosine", 0.0);
            h.jaccard = j.value("jaccard", 0.0);
            h.provider_tag = j.value("provider_tag", "");
            h.created_at = j.value("created_at", "");
            if (h.statement.empty()) throw CorruptRecord(i + 1, "empty statement");
            out.push_back(std::move(h));
        } catch (const json::exception& e) {
            throw CorruptRecord(i + 1, e.what());
        }
    }
    return out;
}

}  // namespace causaforge::hypogen
