#pragma once

#include "perfminer/commit.hpp"
#include "perfminer/linear_model.hpp"
#include "perfminer/llm_gateway.hpp"

#include <cstdint>
#include <set>
#include <string>

namespace perfminer {

struct PipelinePaths {
    std::string keywords;
    std::string lfs;
    std::string taxonomy;
    std::string manifest;
    std::string output_dir;
};

struct MinerSettings {
    std::set<Language> languages = {Language::Python, Language::Cpp, Language::Java};
    std::uint64_t min_stars = 20;
    std::size_t max_functions_changed = 1;
    std::string branch = "main";
    unsigned workers = 1;
};

struct PipelineConfig {
    std::uint64_t seed = 42;
    PipelinePaths paths;
    GatewayConfig gateway;
    MinerSettings miner;
    TrainConfig train;
    std::string config_hash;  // fingerprint of the loaded configuration
};

// JSON config file; unknown keys rejected, referenced files must exist.
// The API key comes only from PERFMINER_LLM_API_KEY.
PipelineConfig load_pipeline_config(const std::string& path);
PipelineConfig parse_pipeline_config(const std::string& text);

// Provenance record embedded in every CLI artifact.
std::string provenance_json_line(const PipelineConfig& config);
std::string provenance_comment(const PipelineConfig& config);

} // namespace perfminer
