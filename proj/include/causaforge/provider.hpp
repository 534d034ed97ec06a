#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <string>

namespace causaforge::extraction {

struct ProviderRequest {
    std::string prompt;
    std::size_t token_estimate = 0;
    std::string model_tag;
};

struct ProviderResponse {
    std::string raw_text;
    std::string model_tag;
    std::chrono::milliseconds latency{0};
};

ProviderRequest make_request(std::string prompt, std::string model_tag);

// complete() throws ProviderError on any failure; the caller owns retries.
class Provider {
public:
    virtual ~Provider() = default;
    virtual ProviderResponse complete(const ProviderRequest& request) = 0;
};

// Chat-completions over HTTP:
//   POST <endpoint>  {"model": m, "messages": [{"role": "user", "content": prompt}]}
//   200 -> {"choices": [{"message": {"content": text}}], ...}
// Authorization: Bearer <api key> when a key is set.
class HttpChatProvider final : public Provider {
public:
    HttpChatProvider(std::string endpoint, std::string api_key, std::chrono::seconds timeout = std::chrono::seconds(120));
    ProviderResponse complete(const ProviderRequest& request) override;

    static std::string request_body(const ProviderRequest& request);
    static std::string parse_response_body(const std::string& body);

private:
    std::string scheme_host_;
    std::string path_;
    std::string api_key_;
    std::chrono::seconds timeout_;
};

inline constexpr const char* kApiKeyEnv = "CAUSAFORGE_API_KEY";

// Fixture-backed provider: the response to a prompt is the file
// `<fixture_dir>/<sha256(prompt)>.txt`. Unknown prompts go to `fallback` if
// one is installed, otherwise complete() throws ProviderError.
class MockProvider final : public Provider {
public:
    using Fallback = std::function<std::string(const ProviderRequest&)>;

    explicit MockProvider(std::filesystem::path fixture_dir, Fallback fallback = {});

    ProviderResponse complete(const ProviderRequest& request) override;

    static std::string fixture_key(const std::string& prompt);
    std::filesystem::path fixture_path(const std::string& prompt) const;

    std::size_t fixture_hits() const { return hits_; }
    std::size_t fallback_hits() const { return fallbacks_; }

private:
    std::filesystem::path dir_;
    Fallback fallback_;
    std::mutex mu_;
    std::size_t hits_ = 0;
    std::size_t fallbacks_ = 0;
};

}  // namespace causaforge::extraction
