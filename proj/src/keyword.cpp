#include "perfminer/keyword.hpp"

#include "perfminer/errors.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace perfminer {

namespace {

// Matches the featurizer's token alphabet.
inline bool is_word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

inline char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c; }

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), ascii_lower);
    return out;
}

std::vector<std::string_view> split_words(std::string_view keyword) {
    std::vector<std::string_view> words;
    std::size_t start = 0;
    while (start < keyword.size()) {
        std::size_t space = keyword.find(' ', start);
        if (space == std::string_view::npos) space = keyword.size();
        if (space > start) words.push_back(keyword.substr(start, space - start));
        start = space + 1;
    }
    return words;
}

std::string normalize_keyword(std::string_view raw) {
    std::string out;
    bool pending_space = false;
    for (char c : raw) {
        char l = ascii_lower(c);
        if (l == ' ' || l == '\t') {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(l);
    }
    return out;
}

} // namespace

bool keyword_matches(std::string_view message, std::string_view keyword) {
    auto words = split_words(keyword);
    if (words.empty()) return false;

    for (std::size_t start = 0; start + words[0].size() <= message.size(); ++start) {
        // Word boundary before the first word.
        if (start > 0 && is_word_char(message[start - 1])) continue;
        std::size_t pos = start;
        bool ok = true;
        for (std::size_t w = 0; w < words.size(); ++w) {
            if (w > 0) {
                // One separator from {space, hyphen, nothing} between words.
                if (pos < message.size() && (message[pos] == ' ' || message[pos] == '-')) ++pos;
            }
            if (message.compare(pos, words[w].size(), words[w]) != 0) {
                ok = false;
                break;
            }
            pos += words[w].size();
        }
        if (!ok) continue;
        // Word boundary after the last word.
        if (pos < message.size() && is_word_char(message[pos])) continue;
        return true;
    }
    return false;
}

HardLabel classify_keyword(std::string_view message, const KeywordList& list) {
    std::string lower = to_lower(message);
    for (const std::string& kw : list.keywords)
        if (keyword_matches(lower, kw)) return HardLabel::Performance;
    return HardLabel::NonPerformance;
}

KeywordList parse_keyword_list(std::string_view text) {
    KeywordList list;
    std::unordered_set<std::string> seen;
    std::size_t pos = 0;
    long line_no = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        ++line_no;
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        std::string kw = normalize_keyword(line);
        if (kw.empty()) {
            if (pos > text.size()) break;
            continue;
        }
        if (!seen.insert(kw).second)
            throw ParseError("duplicate keyword \"" + kw + "\"", line_no);
        list.keywords.push_back(std::move(kw));
        if (pos > text.size()) break;
    }
    if (list.keywords.empty()) throw ParseError("keyword list is empty");
    return list;
}

KeywordList load_keyword_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open keyword file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_keyword_list(buf.str());
}

KeywordList default_keywords() {
    // The first six entries are the conventionally cited core keywords; the
    // remainder is compiled from qualitative studies of performance bugs.
    // Keep in sync with data/keywords.txt.
    static const char* kDefaults[] = {
        "performance",
        "speed up",
        "accelerate",
        "fast",
        "efficient",
        "optimize",
        "latency",
        "throughput",
        "slow",
        "speedup",
        "cache",
        "memory leak",
        "bottleneck",
        "overhead",
        "inefficient",
        "regression",
        "optimization",
        "optimise",
        "optimisation",
        "faster",
        "slower",
        "perf",
        "memory usage",
        "cpu usage",
        "memory consumption",
        "responsiveness",
        "contention",
        "hot path",
        "busy wait",
        "redundant computation",
    };
    KeywordList list;
    list.keywords.assign(std::begin(kDefaults), std::end(kDefaults));
    return list;
}

} // namespace perfminer
