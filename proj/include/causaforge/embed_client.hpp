#pragma once

#include <chrono>
#include <string>
#include <vector>

namespace causaforge::evalstats {

inline constexpr std::size_t kMaxTextsPerRequest = 256;
inline constexpr std::size_t kMaxTextBytes = 8192;

struct EmbedResponse {
    std::string model;
    std::size_t dims = 0;
    std::vector<std::vector<double>> vectors;
};

// Throws InvalidArgument when the batch breaks the wire limits.
std::string embed_request_body(const std::vector<std::string>& texts);

// Checks |vectors| == expected, every length == dims and finite components.
EmbedResponse parse_embed_response(const std::string& body, std::size_t expected);

// Client for the sentence-embedding sidecar (POST /embed, GET /health).
class EmbedClient {
public:
    explicit EmbedClient(std::string base_url, std::chrono::seconds timeout = std::chrono::seconds(120));

    // Splits into batches of at most kMaxTextsPerRequest; order is preserved.
    EmbedResponse embed(const std::vector<std::string>& texts);

    // Returns the /health body; throws ProviderError when unreachable.
    std::string health();

private:
    std::string base_url_;
    std::chrono::seconds timeout_;
};

}  // namespace causaforge::evalstats
