#include "perfminer/pipeline_config.hpp"

#include "perfminer/digest.hpp"
#include "perfminer/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace perfminer {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                         const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok) throw ConfigError("unknown config key \"" + where + key + "\"");
    }
}

void require_file(const std::string& path, const std::string& key) {
    if (path.empty()) return;
    if (!std::filesystem::exists(path))
        throw ConfigError("config paths." + key + " does not exist: " + path);
}

} // namespace

PipelineConfig parse_pipeline_config(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ConfigError("pipeline config is not a JSON object");
    reject_unknown_keys(j, {"seed", "paths", "gateway", "miner", "train"}, "");

    PipelineConfig config;
    config.seed = j.value("seed", config.seed);

    if (j.contains("paths")) {
        const json& p = j.at("paths");
        reject_unknown_keys(p, {"keywords", "lfs", "taxonomy", "manifest", "output_dir"}, "paths.");
        config.paths.keywords = p.value("keywords", "");
        config.paths.lfs = p.value("lfs", "");
        config.paths.taxonomy = p.value("taxonomy", "");
        config.paths.manifest = p.value("manifest", "");
        config.paths.output_dir = p.value("output_dir", "");
    }

    if (j.contains("gateway")) {
        const json& g = j.at("gateway");
        reject_unknown_keys(g,
                            {"endpoint_url", "model_name", "timeout_seconds", "max_retries",
                             "backoff_initial_ms", "max_in_flight", "classify_max_tokens",
                             "categorize_max_tokens"},
                            "gateway.");
        config.gateway.endpoint_url = g.value("endpoint_url", "");
        config.gateway.model_name = g.value("model_name", config.gateway.model_name);
        config.gateway.timeout_seconds = g.value("timeout_seconds", config.gateway.timeout_seconds);
        config.gateway.max_retries = g.value("max_retries", config.gateway.max_retries);
        config.gateway.backoff_initial_ms =
            g.value("backoff_initial_ms", config.gateway.backoff_initial_ms);
        config.gateway.max_in_flight = g.value("max_in_flight", config.gateway.max_in_flight);
        config.gateway.classify_max_tokens =
            g.value("classify_max_tokens", config.gateway.classify_max_tokens);
        config.gateway.categorize_max_tokens =
            g.value("categorize_max_tokens", config.gateway.categorize_max_tokens);
    }

    if (j.contains("miner")) {
        const json& m = j.at("miner");
        reject_unknown_keys(
            m, {"languages", "min_stars", "max_functions_changed", "branch", "workers"}, "miner.");
        if (m.contains("languages")) {
            config.miner.languages.clear();
            for (const auto& lang : m.at("languages"))
                config.miner.languages.insert(language_from_string(lang.get<std::string>()));
            if (config.miner.languages.empty())
                throw ConfigError("miner.languages must be non-empty");
        }
        config.miner.min_stars = m.value("min_stars", config.miner.min_stars);
        config.miner.max_functions_changed =
            m.value("max_functions_changed", config.miner.max_functions_changed);
        if (config.miner.max_functions_changed == 0)
            throw ConfigError("miner.max_functions_changed must be >= 1");
        config.miner.branch = m.value("branch", config.miner.branch);
        config.miner.workers = m.value("workers", config.miner.workers);
        if (config.miner.workers == 0) throw ConfigError("miner.workers must be >= 1");
    }

    if (j.contains("train")) {
        const json& t = j.at("train");
        reject_unknown_keys(t, {"epochs", "learning_rate", "l2", "dim_log2", "batch_size"},
                            "train.");
        config.train.epochs = t.value("epochs", config.train.epochs);
        config.train.learning_rate = t.value("learning_rate", config.train.learning_rate);
        config.train.l2 = t.value("l2", config.train.l2);
        unsigned dim_log2 = t.value("dim_log2", 18u);
        if (dim_log2 < 10 || dim_log2 > 26)
            throw ConfigError("train.dim_log2 must lie in [10, 26]");
        config.train.dim = 1u << dim_log2;
        config.train.batch_size = t.value("batch_size", config.train.batch_size);
    }
    config.train.seed = config.seed;

    // Fingerprint the canonical serialization (api key excluded, it never
    // lives in the file).
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(digest::fnv1a64(j.dump())));
    config.config_hash = hex;
    return config;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    PipelineConfig config = parse_pipeline_config(buf.str());
    require_file(config.paths.keywords, "keywords");
    require_file(config.paths.lfs, "lfs");
    require_file(config.paths.taxonomy, "taxonomy");
    require_file(config.paths.manifest, "manifest");
    config.gateway = gateway_config_from_env(config.gateway);
    return config;
}

std::string provenance_json_line(const PipelineConfig& config) {
    json j;
    j["_provenance"] = {{"config_hash", config.config_hash}, {"seed", config.seed}};
    return j.dump();
}

std::string provenance_comment(const PipelineConfig& config) {
    return "# provenance config_hash=" + config.config_hash +
           " seed=" + std::to_string(config.seed);
}

} // namespace perfminer
