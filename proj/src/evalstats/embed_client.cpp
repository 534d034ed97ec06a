#include "causaforge/embed_client.hpp"

#include <httplib.h>

#include <cmath>
#include <json.hpp>

#include "causaforge/errors.hpp"

namespace causaforge::evalstats {

using nlohmann::json;

std::string embed_request_body(const std::vector<std::string>& texts) {
    if (texts.empty() || texts.size() > kMaxTextsPerRequest)
        throw InvalidArgument("embed batch must hold 1.." + std::to_string(kMaxTextsPerRequest) + " texts");
    for (const auto& t : texts)
        if (t.size() > kMaxTextBytes) throw InvalidArgument("embed text exceeds " + std::to_string(kMaxTextBytes) + " bytes");
    return json{{"texts", texts}}.dump();
}

EmbedResponse parse_embed_response(const std::string& body, std::size_t expected) {
    EmbedResponse r;
    try {
        const json j = json::parse(body);
        r.model = j.at("model").get<std::string>();
        r.dims = j.at("dims").get<std::size_t>();
        r.vectors = j.at("vectors").get<std::vector<std::vector<double>>>();
    } catch (const json::exception& e) {
        throw ProviderError(std::string("malformed embed response: ") + e.what());
    }
    if (r.vectors.size() != expected)
        throw ProviderError("embed response has " + std::to_string(r.vectors.size()) + " vectors for " +
                            std::to_string(expected) + " texts");
    for (const auto& v : r.vectors) {
        if (v.size() != r.dims) throw ProviderError("embed vector length differs from declared dims");
        for (double x : v)
            if (!std::isfinite(x)) throw ProviderError("embed vector has a non-finite component");
    }
    return r;
}

EmbedClient::EmbedClient(std::string base_url, std::chrono::seconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {
    while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

EmbedResponse EmbedClient::embed(const std::vector<std::string>& texts) {
    httplib::Client client(base_url_);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    EmbedResponse out;
    for (std::size_t start = 0; start < texts.size(); start += kMaxTextsPerRequest) {
        const std::size_t end = std::min(texts.size(), start + kMaxTextsPerRequest);
        const std::vector<std::string> batch(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                             texts.begin() + static_cast<std::ptrdiff_t>(end));
        auto res = client.Post("/embed", embed_request_body(batch), "application/json");
        if (!res) throw ProviderError("embed request failed: " + httplib::to_string(res.error()));
        if (res->status != 200) throw ProviderError("embed service returned HTTP " + std::to_string(res->status));
        auto part = parse_embed_response(res->body, batch.size());
        if (start == 0) {
            out.model = part.model;
            out.dims = part.dims;
        } else if (part.dims != out.dims || part.model != out.model) {
            throw ProviderError("embed service changed model between batches");
        }
        for (auto& v : part.vectors) out.vectors.push_back(std::move(v));
    }
    return out;
}

std::string EmbedClient::health() {
    httplib::Client client(base_url_);
    client.set_connection_timeout(timeout_);
    auto res = client.Get("/health");
    if (!res) throw ProviderError("health check failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw ProviderError("health check returned HTTP " + std::to_string(res->status));
    return res->body;
}

}  // namespace causaforge::evalstats
