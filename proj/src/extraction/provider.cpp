#include "causaforge/provider.hpp"

#include <httplib.h>

#include <json.hpp>

#include "causaforge/corpus.hpp"
#include "causaforge/errors.hpp"
#include "causaforge/hash.hpp"
#include "causaforge/io.hpp"

namespace causaforge::extraction {

using nlohmann::json;

ProviderRequest make_request(std::string prompt, std::string model_tag) {
    ProviderRequest r;
    r.token_estimate = std::max<std::size_t>(1, corpus::estimate_tokens(prompt));
    r.prompt = std::move(prompt);
    r.model_tag = std::move(model_tag);
    return r;
}

HttpChatProvider::HttpChatProvider(std::string endpoint, std::string api_key, std::chrono::seconds timeout)
    : api_key_(std::move(api_key)), timeout_(timeout) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) throw InvalidArgument("endpoint needs a scheme: " + endpoint);
    const auto path_begin = endpoint.find('/', scheme_end + 3);
    scheme_host_ = endpoint.substr(0, path_begin);
    path_ = path_begin == std::string::npos ? "/" : endpoint.substr(path_begin);
}

std::string HttpChatProvider::request_body(const ProviderRequest& request) {
    json body = {{"model", request.model_tag},
                 {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})}};
    return body.dump();
}

std::string HttpChatProvider::parse_response_body(const std::string& body) {
    try {
        const json j = json::parse(body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw ProviderError(std::string("malformed chat-completions response: ") + e.what());
    }
}

ProviderResponse HttpChatProvider::complete(const ProviderRequest& request) {
    httplib::Client client(scheme_host_);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    const auto start = std::chrono::steady_clock::now();
    auto res = client.Post(path_, headers, request_body(request), "application/json");
    if (!res) throw ProviderError("HTTP request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw ProviderError("HTTP status " + std::to_string(res->status));
    ProviderResponse out;
    out.raw_text = parse_response_body(res->body);
    out.model_tag = request.model_tag;
    out.latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    return out;
}

MockProvider::MockProvider(std::filesystem::path fixture_dir, Fallback fallback)
    : dir_(std::move(fixture_dir)), fallback_(std::move(fallback)) {}

std::string MockProvider::fixture_key(const std::string& prompt) { return sha256_hex(prompt); }

std::filesystem::path MockProvider::fixture_path(const std::string& prompt) const {
    return dir_ / (fixture_key(prompt) + ".txt");
}

ProviderResponse MockProvider::complete(const ProviderRequest& request) {
    ProviderResponse out;
    out.model_tag = request.model_tag.empty() ? "mock" : request.model_tag;
    const auto path = fixture_path(request.prompt);
    std::error_code ec;
    if (std::filesystem::is_regular_file(path, ec)) {
        out.raw_text = io::read_file(path);
        std::lock_guard lock(mu_);
        ++hits_;
        return out;
    }
    if (!fallback_) throw ProviderError("no mock fixture " + path.filename().string());
    out.raw_text = fallback_(request);
    std::lock_guard lock(mu_);
    ++fallbacks_;
    return out;
}

}  // namespace causaforge::extraction
