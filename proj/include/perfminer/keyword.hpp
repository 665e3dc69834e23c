#pragma once

#include "perfminer/commit.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace perfminer {

// Curated lowercase keyword phrases. Entries are pre-normalized: lowercase,
// single internal spaces, no surrounding whitespace, no duplicates.
struct KeywordList {
    std::vector<std::string> keywords;
};

// The built-in 30-entry list. Six entries are the conventionally cited
// performance keywords; the rest come from qualitative-study vocabulary and
// can be replaced via a keyword file.
KeywordList default_keywords();

// One keyword per line; '#' starts a comment; blank lines ignored.
// Entries are normalized on load; duplicates after normalization are an error.
KeywordList load_keyword_file(const std::string& path);
KeywordList parse_keyword_list(std::string_view text);

// Performance iff any keyword matches. Matching is case-insensitive and
// word-boundary anchored; the words of a multi-word keyword match when
// adjacent in the message separated by a space, a hyphen, or nothing
// ("speed up" matches "speed up", "speed-up" and "speedup").
HardLabel classify_keyword(std::string_view message, const KeywordList& list);

bool keyword_matches(std::string_view message_lower, std::string_view keyword);

} // namespace perfminer
