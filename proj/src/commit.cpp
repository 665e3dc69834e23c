#include "perfminer/commit.hpp"

#include "perfminer/errors.hpp"

namespace perfminer {

std::string to_string(Language lang) {
    switch (lang) {
    case Language::Python: return "python";
    case Language::Cpp: return "cpp";
    case Language::Java: return "java";
    }
    throw ValidationError("language: unknown enum value");
}

Language language_from_string(const std::string& s) {
    if (s == "python") return Language::Python;
    if (s == "cpp") return Language::Cpp;
    if (s == "java") return Language::Java;
    throw ValidationError("language: expected one of python|cpp|java, got \"" + s + "\"");
}

std::string to_string(HardLabel label) {
    return label == HardLabel::Performance ? "performance" : "non-performance";
}

HardLabel hard_label_from_string(const std::string& s) {
    if (s == "performance") return HardLabel::Performance;
    if (s == "non-performance") return HardLabel::NonPerformance;
    throw ValidationError("label: expected performance|non-performance, got \"" + s + "\"");
}

namespace {

bool is_sha40(const std::string& s) {
    if (s.size() != 40) return false;
    for (char c : s) {
        bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
        if (!ok) return false;
    }
    return true;
}

std::size_t count_hunk_headers(const std::string& diff) {
    std::size_t count = 0;
    std::size_t pos = 0;
    while (pos < diff.size()) {
        std::size_t eol = diff.find('\n', pos);
        if (eol == std::string::npos) eol = diff.size();
        if (diff.compare(pos, 4, "@@ -") == 0) ++count;
        pos = eol + 1;
    }
    return count;
}

} // namespace

void validate(const CommitRecord& record) {
    if (!is_sha40(record.commit_sha))
        throw ValidationError("commit_sha: must match [0-9a-f]{40}, got \"" + record.commit_sha + "\"");
    if (record.function_before.empty() && record.function_after.empty())
        throw ValidationError("function_before/function_after: must not both be empty");
    if (!record.diff.empty()) {
        std::size_t hunks = count_hunk_headers(record.diff);
        if (record.functions_changed > hunks)
            throw ValidationError("functions_changed: " + std::to_string(record.functions_changed) +
                                  " exceeds hunk count " + std::to_string(hunks));
    }
}

} // namespace perfminer
