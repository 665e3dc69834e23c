#pragma once

#include "perfminer/commit.hpp"

#include <optional>
#include <string>
#include <vector>

namespace perfminer {

struct DiffHunk {
    long old_start = 0, old_count = 0, new_start = 0, new_count = 0;
    std::string context;             // text after the closing @@ of the header
    std::vector<std::string> lines;  // body lines, prefix character included
};

struct DiffFile {
    std::string old_path;  // "/dev/null" for added files
    std::string new_path;  // "/dev/null" for deleted files
    std::vector<DiffHunk> hunks;

    // new path when present, else old path.
    const std::string& path() const {
        return new_path == "/dev/null" ? old_path : new_path;
    }
};

// git-style unified diff. Throws ParseError on structural damage (hunk body
// shorter than its header claims, headers out of order).
std::vector<DiffFile> parse_unified_diff(const std::string& diff);

std::optional<Language> language_from_path(const std::string& path);

// One changed function, attributed from the diff; before/after text is
// filled in later from the blobs.
struct FunctionChange {
    std::string file_path;
    std::string function_name;  // empty when attribution failed (anonymous)
    std::string before;
    std::string after;
    std::size_t hunks = 0;
};

struct FunctionCount {
    std::size_t count = 0;  // distinct (file, function) pairs, anonymous hunks count one each
    std::vector<FunctionChange> changes;
};

// Attributes each hunk to a function via the hunk-header context line when
// present, else a per-language scan of the hunk's leading lines. Hunks with
// no attribution each count as their own anonymous function, which biases
// tangled-commit filtering toward exclusion.
FunctionCount count_changed_functions(const std::string& diff);
FunctionCount count_changed_functions(const std::vector<DiffFile>& files);

// Pulls the named function's text out of a source blob. Python: def/class
// block by indentation. C++/Java: signature line plus brace-balanced body,
// comment- and string-aware.
std::optional<std::string> extract_function(const std::string& source, const std::string& name,
                                            Language lang);

// Function name from a hunk-header context line ("def foo(x):",
// "static int foo(void *p)"), empty when none is recognizable.
std::string function_name_from_context(const std::string& context, std::optional<Language> lang);

} // namespace perfminer
