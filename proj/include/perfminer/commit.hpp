#pragma once

#include <cstdint>
#include <string>

namespace perfminer {

enum class Language { Python, Cpp, Java };

std::string to_string(Language lang);
Language language_from_string(const std::string& s);

// Integer encoding is part of the contract: Performance=1, NonPerformance=0.
enum class HardLabel : int { NonPerformance = 0, Performance = 1 };

std::string to_string(HardLabel label);
HardLabel hard_label_from_string(const std::string& s);

// Labeling-function vote. Abstain never appears in final dataset labels.
enum class LfVote : int { NonPerformance = 0, Performance = 1, Abstain = -1 };

// Probability of the performance class; the non-performance probability is
// its complement.
struct SoftLabel {
    double p_performance = 0.5;

    double p_non_performance() const { return 1.0 - p_performance; }
    HardLabel harden(double threshold = 0.5) const {
        return p_performance >= threshold ? HardLabel::Performance : HardLabel::NonPerformance;
    }
    bool operator==(const SoftLabel&) const = default;
};

// One mined commit with the before/after text of its single changed function.
struct CommitRecord {
    std::string repo_id;     // owner/name
    std::string commit_sha;  // 40-char lowercase hex
    std::string message;
    Language language = Language::Python;
    std::uint64_t files_changed = 0;
    std::uint64_t functions_changed = 0;
    std::string function_before;  // empty for added functions
    std::string function_after;   // empty for deleted functions
    std::string diff;
    std::uint64_t stars = 0;
    std::string committed_at;  // ISO-8601 UTC, e.g. 2021-03-04T05:06:07Z

    bool operator==(const CommitRecord&) const = default;
};

// Throws ValidationError naming the offending field.
void validate(const CommitRecord& record);

} // namespace perfminer
