#pragma once

#include "perfminer/commit.hpp"
#include "perfminer/linear_model.hpp"
#include "perfminer/llm_gateway.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace perfminer {

struct TeacherResponse {
    HardLabel label = HardLabel::NonPerformance;
    std::optional<double> p_performance;  // consistent with label at 0.5 when present
    std::string raw_text;
};

// One teacher call for one message. Throws ParseError when the response is
// unusable; callers record the skip, never default the label.
TeacherResponse query_teacher(LlmGateway& gateway, const std::string& message,
                              unsigned max_tokens = 5);

// Soft label from the teacher: served class probabilities pass through,
// text-only answers degrade to one-hot targets.
SoftLabel teacher_label(LlmGateway& gateway, const std::string& message, unsigned max_tokens = 5);

// Disk-backed teacher label cache, JSONL of
//   {"message_sha256": ..., "p_performance": number|null, "raw_text": ...}
// Null probability records a message the teacher answered unusably; it is
// never re-queried within the same run lineage.
class TeacherCache {
public:
    TeacherCache() = default;                      // in-memory only
    explicit TeacherCache(const std::string& path);  // loads, then appends

    struct Entry {
        std::optional<double> p_performance;
        std::string raw_text;
    };

    std::optional<Entry> lookup(const std::string& message) const;
    void store(const std::string& message, const Entry& entry);
    std::size_t size() const;

private:
    std::unordered_map<std::string, Entry> entries_;
    std::string path_;
};

struct DistillReport {
    std::size_t corpus_size = 0;
    std::size_t labeled = 0;
    std::size_t teacher_performance = 0;      // p >= 0.5
    std::size_t teacher_non_performance = 0;  // p < 0.5
    std::size_t skipped = 0;                  // unusable teacher responses
    std::size_t cache_hits = 0;
    double final_training_loss = 0.0;
};

struct DistillOptions {
    std::size_t n_per_class = 0;
    TrainConfig train_config;
    std::uint64_t seed = 0;
    std::string cache_path;  // empty: labels kept in memory only
    unsigned workers = 4;    // bound on in-flight teacher requests
    unsigned classify_max_tokens = 5;
};

// Teacher-labels the corpus (cached, resumable), balances n_per_class per
// side, trains the student. Gateway outages surface as ResumableError after
// flushing the cache; rerunning with the same cache continues the run.
std::pair<LinearTextModel, DistillReport> distill(std::span<const std::string> corpus,
                                                  LlmGateway& gateway,
                                                  const DistillOptions& options);

} // namespace perfminer
