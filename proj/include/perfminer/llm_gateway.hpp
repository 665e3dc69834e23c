#pragma once

#include "perfminer/commit.hpp"
#include "perfminer/taxonomy.hpp"

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace perfminer {

struct GatewayConfig {
    std::string endpoint_url;  // e.g. http://localhost:8080/v1/complete
    std::string api_key;       // read from PERFMINER_LLM_API_KEY, never a file
    std::string model_name = "mistral-7b";
    double temperature = 0.0;  // pinned; gateways reject anything else
    unsigned classify_max_tokens = 5;
    unsigned categorize_max_tokens = 256;
    unsigned timeout_seconds = 30;
    unsigned max_retries = 3;       // additional attempts after the first
    unsigned backoff_initial_ms = 250;  // doubles per retry
    unsigned max_in_flight = 4;
};

// Reads the API key from the environment (PERFMINER_LLM_API_KEY).
GatewayConfig gateway_config_from_env(GatewayConfig base = {});

struct LlmRequest {
    std::string model;
    std::string prompt;
    double temperature = 0.0;
    unsigned max_tokens = 0;
};

struct Completion {
    std::string text;
    std::optional<double> p_performance;  // from "class_probabilities" when served
};

class LlmGateway {
public:
    virtual ~LlmGateway() = default;
    virtual Completion complete(const std::string& prompt, unsigned max_tokens) = 0;
};

// Minimal completion-style JSON API over HTTP. Request body:
//   {"model": ..., "prompt": ..., "temperature": 0, "max_tokens": N}
// Response body:
//   {"text": "...", "class_probabilities": {"performance": 0.83}}   (probabilities optional)
// Retries 5xx and transport failures with exponential backoff; 4xx is
// permanent. Concurrent callers are bounded by config.max_in_flight.
class HttpGateway : public LlmGateway {
public:
    explicit HttpGateway(GatewayConfig config);
    ~HttpGateway() override;
    Completion complete(const std::string& prompt, unsigned max_tokens) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Deterministic in-process gateway for tests: a handler maps requests to
// completions, and every request is recorded for assertions.
class MockGateway : public LlmGateway {
public:
    using Handler = std::function<Completion(const LlmRequest&)>;

    MockGateway(GatewayConfig config, Handler handler);
    Completion complete(const std::string& prompt, unsigned max_tokens) override;

    std::vector<LlmRequest> requests() const;

private:
    GatewayConfig config_;
    Handler handler_;
    mutable std::mutex mutex_;
    std::vector<LlmRequest> requests_;
};

// Mock handler that classifies by running `label` on the message recovered
// from a classification prompt. `label` returns the response text.
MockGateway::Handler keyword_oracle_handler(std::function<std::string(const std::string&)> label);

// Prompt builders are pure; their outputs are pinned by golden files in data/golden.
std::string build_classification_prompt(const std::string& message);
std::string build_categorization_prompt(const CommitRecord& record, const Taxonomy& taxonomy);

// Recovers the message block from a classification prompt (mock support).
std::string extract_message_from_classification_prompt(const std::string& prompt);

// Case-insensitive: the non-performance spellings are checked before the
// bare "performance" substring. Throws ParseError when neither occurs.
HardLabel parse_class_response(const std::string& text);

// Extracts `Category :: Subcategory` lines, validates names against the
// taxonomy, drops duplicates keeping first occurrence. Throws ParseError on
// unknown names or when no valid pair is present.
std::vector<std::pair<std::string, std::string>> parse_category_response(const std::string& text,
                                                                         const Taxonomy& taxonomy);

} // namespace perfminer
