#include "perfminer/llm_gateway.hpp"

#include "perfminer/errors.hpp"

#include <json.hpp>

#define CPPHTTPLIB_THREAD_POOL_COUNT 4
#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <semaphore>
#include <thread>

namespace perfminer {

using nlohmann::json;

GatewayConfig gateway_config_from_env(GatewayConfig base) {
    if (const char* key = std::getenv("PERFMINER_LLM_API_KEY")) base.api_key = key;
    return base;
}

// ------------------------------------------------------------ prompts ----

std::string build_classification_prompt(const std::string& message) {
    std::string prompt;
    prompt += "You classify GitHub commit messages.\n";
    prompt += "\n";
    prompt += "Task: decide whether the commit message below describes a performance bug fix "
              "or a non-performance change.\n";
    prompt += "\n";
    prompt += "Label definitions:\n";
    prompt += "- performance: the commit fixes a performance problem, such as excessive run time, "
              "memory use, disk or network I/O, or concurrency inefficiency.\n";
    prompt += "- non-performance: the commit does anything else, such as adding features, fixing "
              "functional bugs, updating documentation or tests, refactoring, or build and tooling "
              "changes.\n";
    prompt += "\n";
    prompt += "Commit message:\n";
    prompt += message;
    prompt += "\n\n";
    prompt += "Respond with exactly one word: performance or non-performance.\n";
    return prompt;
}

std::string extract_message_from_classification_prompt(const std::string& prompt) {
    static const std::string kHead = "Commit message:\n";
    static const std::string kTail = "\n\nRespond with exactly one word:";
    std::size_t start = prompt.find(kHead);
    std::size_t end = prompt.rfind(kTail);
    if (start == std::string::npos || end == std::string::npos || end < start + kHead.size())
        throw ParseError("not a classification prompt");
    start += kHead.size();
    return prompt.substr(start, end - start);
}

std::string build_categorization_prompt(const CommitRecord& record, const Taxonomy& taxonomy) {
    if (record.diff.empty())
        throw ValidationError("diff: categorization needs a non-empty code diff");

    std::string prompt;
    prompt += "You are provided with a GitHub commit in the following format:\n";
    prompt += "\n";
    prompt += "Commit message:\n" + record.message + "\n";
    prompt += "\n";
    prompt += "Original code:\n" + record.function_before + "\n";
    prompt += "\n";
    prompt += "Modified code:\n" + record.function_after + "\n";
    prompt += "\n";
    prompt += "Code diff:\n" + record.diff + "\n";
    prompt += "\n";
    prompt += "Task description:\n";
    prompt += "This commit fixes a performance bug. Assign the root cause to one category and one "
              "subcategory from the taxonomy below. Reason step by step:\n";
    prompt += "1. Identify the performance symptom the commit message describes.\n";
    prompt += "2. Locate the root cause by comparing the original code with the modified code and "
              "the diff.\n";
    prompt += "3. Choose the category that best matches the root cause.\n";
    prompt += "4. Choose the best matching subcategory within that category.\n";
    prompt += "\n";
    prompt += "Categories:\n";
    for (const auto& cat : taxonomy.categories) {
        prompt += "- " + cat.name;
        if (!cat.description.empty()) prompt += ": " + cat.description;
        prompt += "\n";
        for (const auto& sub : cat.subcategories) {
            prompt += "  * " + sub.name;
            if (!sub.description.empty()) prompt += ": " + sub.description;
            prompt += "\n";
        }
    }
    prompt += "\n";
    prompt += "Output description:\n";
    prompt += "After your reasoning, print each assigned label on its own line in exactly this "
              "form:\n";
    prompt += "Category :: Subcategory\n";
    prompt += "Use only names listed above.\n";
    return prompt;
}

// ------------------------------------------------------------- parsing ----

namespace {

std::string ascii_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c; });
    return s;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

HardLabel parse_class_response(const std::string& text) {
    std::string lower = ascii_lower(text);
    if (lower.find("non-performance") != std::string::npos ||
        lower.find("non performance") != std::string::npos ||
        lower.find("nonperformance") != std::string::npos)
        return HardLabel::NonPerformance;
    if (lower.find("performance") != std::string::npos) return HardLabel::Performance;
    throw ParseError("response carries neither class label: \"" + text + "\"");
}

std::vector<std::pair<std::string, std::string>> parse_category_response(const std::string& text,
                                                                         const Taxonomy& taxonomy) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::vector<std::string> offenders;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        std::size_t sep = line.find("::");
        if (sep == std::string::npos) {
            if (eol == text.size()) break;
            continue;
        }
        std::string category = trim(line.substr(0, sep));
        std::string subcategory = trim(line.substr(sep + 2));
        if (category.empty() || subcategory.empty()) {
            offenders.push_back(trim(line));
        } else if (!taxonomy.has(category, subcategory)) {
            offenders.push_back(category + " :: " + subcategory);
        } else {
            auto pair = std::make_pair(category, subcategory);
            if (std::find(pairs.begin(), pairs.end(), pair) == pairs.end())
                pairs.push_back(std::move(pair));
        }
        if (eol == text.size()) break;
    }
    if (!offenders.empty()) {
        std::string msg = "unknown category label";
        msg += offenders.size() > 1 ? "s: " : ": ";
        for (std::size_t i = 0; i < offenders.size(); ++i)
            msg += (i ? "; " : "") + offenders[i];
        throw ParseError(msg);
    }
    if (pairs.empty()) throw ParseError("no `Category :: Subcategory` line in response");
    return pairs;
}

// ----------------------------------------------------------- transport ----

namespace {

struct ParsedUrl {
    std::string base;  // scheme://host[:port]
    std::string path;  // /path, defaults to "/"
};

ParsedUrl split_url(const std::string& url) {
    std::size_t scheme = url.find("://");
    if (scheme == std::string::npos)
        throw ConfigError("endpoint_url must carry a scheme: " + url);
    std::size_t path = url.find('/', scheme + 3);
    if (path == std::string::npos) return {url, "/"};
    return {url.substr(0, path), url.substr(path)};
}

json request_body(const LlmRequest& request) {
    json j;
    j["model"] = request.model;
    j["prompt"] = request.prompt;
    j["temperature"] = request.temperature;
    j["max_tokens"] = request.max_tokens;
    return j;
}

Completion parse_completion(const std::string& body) {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("text"))
        throw TransportError("gateway response is not a completion object: " + body,
                             /*permanent=*/true);
    Completion c;
    c.text = j.at("text").get<std::string>();
    if (j.contains("class_probabilities")) {
        const json& probs = j.at("class_probabilities");
        if (probs.contains("performance")) c.p_performance = probs.at("performance").get<double>();
    }
    return c;
}

} // namespace

struct HttpGateway::Impl {
    GatewayConfig config;
    ParsedUrl url;
    std::counting_semaphore<64> in_flight;

    Impl(GatewayConfig cfg, ParsedUrl parsed, unsigned permits)
        : config(std::move(cfg)), url(std::move(parsed)), in_flight(permits) {}
};

HttpGateway::HttpGateway(GatewayConfig config) {
    if (config.temperature != 0.0)
        throw ConfigError("gateway temperature is pinned to 0");
    if (config.max_in_flight == 0 || config.max_in_flight > 64)
        throw ConfigError("max_in_flight must lie in [1, 64]");
    ParsedUrl url = split_url(config.endpoint_url);
    unsigned permits = config.max_in_flight;
    impl_ = std::make_unique<Impl>(std::move(config), std::move(url), permits);
}

HttpGateway::~HttpGateway() = default;

Completion HttpGateway::complete(const std::string& prompt, unsigned max_tokens) {
    const GatewayConfig& cfg = impl_->config;
    LlmRequest request{cfg.model_name, prompt, cfg.temperature, max_tokens};
    std::string body = request_body(request).dump();

    impl_->in_flight.acquire();
    struct Release {
        std::counting_semaphore<64>& sem;
        ~Release() { sem.release(); }
    } release{impl_->in_flight};

    httplib::Client client(impl_->url.base);
    client.set_connection_timeout(cfg.timeout_seconds, 0);
    client.set_read_timeout(cfg.timeout_seconds, 0);
    httplib::Headers headers;
    if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);

    std::string last_error;
    unsigned backoff_ms = cfg.backoff_initial_ms;
    for (unsigned attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
            backoff_ms *= 2;
        }
        httplib::Result res = client.Post(impl_->url.path, headers, body, "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 200 && res->status < 300) return parse_completion(res->body);
        if (res->status >= 400 && res->status < 500)
            throw TransportError("gateway rejected request with HTTP " +
                                     std::to_string(res->status) + ": " + res->body,
                                 /*permanent=*/true);
        last_error = "HTTP " + std::to_string(res->status);
    }
    throw TransportError("gateway unreachable after " + std::to_string(cfg.max_retries + 1) +
                         " attempts (" + last_error + ")");
}

// ---------------------------------------------------------------- mock ----

MockGateway::MockGateway(GatewayConfig config, Handler handler)
    : config_(std::move(config)), handler_(std::move(handler)) {
    if (config_.temperature != 0.0) throw ConfigError("gateway temperature is pinned to 0");
}

Completion MockGateway::complete(const std::string& prompt, unsigned max_tokens) {
    LlmRequest request{config_.model_name, prompt, config_.temperature, max_tokens};
    {
        std::lock_guard lock(mutex_);
        requests_.push_back(request);
    }
    return handler_(request);
}

std::vector<LlmRequest> MockGateway::requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
}

MockGateway::Handler keyword_oracle_handler(std::function<std::string(const std::string&)> label) {
    return [label = std::move(label)](const LlmRequest& request) {
        std::string message = extract_message_from_classification_prompt(request.prompt);
        return Completion{label(message), std::nullopt};
    };
}

} // namespace perfminer
