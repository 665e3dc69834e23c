#include "perfminer/taxonomy.hpp"

#include "perfminer/errors.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

namespace perfminer {

bool Taxonomy::has(const std::string& category, const std::string& subcategory) const {
    return flat_index(category, subcategory).has_value();
}

std::optional<std::size_t> Taxonomy::flat_index(const std::string& category,
                                                const std::string& subcategory) const {
    std::size_t idx = 0;
    for (const auto& cat : categories) {
        for (const auto& sub : cat.subcategories) {
            if (cat.name == category && sub.name == subcategory) return idx;
            ++idx;
        }
    }
    return std::nullopt;
}

std::size_t Taxonomy::subcategory_count() const {
    std::size_t n = 0;
    for (const auto& cat : categories) n += cat.subcategories.size();
    return n;
}

Taxonomy default_taxonomy() {
    // Keep in sync with data/taxonomy.txt.
    Taxonomy t;
    t.categories = {
        {"API Misuse",
         "The fix changes how a library or framework API is used",
         {{"Incorrect API Usage", "an API is called in a way that is functionally fine but needlessly expensive"},
          {"Deprecated API", "a slow or obsolete API is replaced by its faster successor"},
          {"Redundant API Calls", "the same API result is fetched or computed more times than needed"},
          {"Misc. API Misuse", "other API-level inefficiencies"}}},
        {"Memory Inefficiency",
         "The fix reduces memory consumption or churn",
         {{"Memory Leak", "memory is allocated and never released"},
          {"Unnecessary Memory Allocation", "objects or buffers are allocated more often or larger than needed"},
          {"Misc. Memory Inefficiency", "other memory-related waste"}}},
        {"Poor Concurrency Control",
         "The fix changes locking or synchronization behavior",
         {{"Thread Contention", "threads compete for a shared resource and stall each other"},
          {"Unnecessary locks", "locking is used where no shared state needs protection"},
          {"Unnecessary Thread Synchronization", "synchronization is broader or more frequent than required"},
          {"Misc. Poor Concurrency Control", "other concurrency-control inefficiencies"}}},
        {"Inefficient I/O",
         "The fix reduces disk or file-system work",
         {{"Inefficient Disk I/O", "files are read or written in small, repeated, or unbuffered operations"},
          {"Inefficient Caching", "results that should be cached are recomputed or refetched"},
          {"Unnecessary Logging", "logging volume or formatting slows the program"},
          {"Misc. Inefficient I/O", "other I/O inefficiencies"}}},
        {"Network Bottlenecks",
         "The fix reduces network traffic or round trips",
         {{"Inefficient Data Transfer", "more bytes are transferred than needed"},
          {"Excessive Network Calls", "too many requests are issued where fewer would do"},
          {"Misc. Network Bottlenecks", "other network-related inefficiencies"}}},
        {"Inefficient Algorithm/Data-structure",
         "The fix replaces an algorithm or data structure with a cheaper one",
         {{"Suboptimal Data Structures", "a container with the wrong access characteristics is used"},
          {"Suboptimal Algorithm", "an asymptotically or constant-factor slower algorithm is used"},
          {"Expensive Operation", "a costly operation runs where a cheaper equivalent exists"},
          {"Unnecessary computations", "work is computed whose result is unused or already known"},
          {"Inefficient Loops", "loop structure causes repeated or excessive work"},
          {"Misc. Inefficient Algorithm/Data-structure", "other algorithmic inefficiencies"}}},
        {"Parallelization",
         "The fix adds or repairs parallel execution",
         {{"Missing Parallelism", "serial code is parallelized"},
          {"Inefficient Parallelism", "existing parallel code scales or balances poorly"},
          {"Misc. Parallelization", "other parallelization issues"}}},
        {"Micro-architectural",
         "The fix targets hardware-level behavior",
         {{"Data Locality", "memory layout or access order is changed for cache behavior"},
          {"Missed Compiler Optimization", "code is restructured so the compiler can optimize it"},
          {"Misc. Micro-architectural", "other hardware-level optimizations"}}},
        {"Other",
         "Performance fixes that fit no category above",
         {{"Misc. Other", "uncategorized performance improvements"}}},
    };
    return t;
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

// "Name | description" -> (Name, description)
std::pair<std::string, std::string> split_entry(std::string_view body, long line_no) {
    std::size_t bar = body.find('|');
    std::string name = trim(bar == std::string_view::npos ? body : body.substr(0, bar));
    std::string desc = bar == std::string_view::npos ? "" : trim(body.substr(bar + 1));
    if (name.empty()) throw ParseError("taxonomy entry has an empty name", line_no);
    return {name, desc};
}

} // namespace

Taxonomy parse_taxonomy(std::string_view text) {
    Taxonomy t;
    std::unordered_set<std::string> names;
    std::istringstream in{std::string(text)};
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string body = trim(line);
        if (body.empty() || body[0] == '#') continue;
        if (body.rfind("category:", 0) == 0) {
            auto [name, desc] = split_entry(body.substr(9), line_no);
            if (!names.insert(name).second)
                throw ParseError("duplicate taxonomy name \"" + name + "\"", line_no);
            t.categories.push_back({name, desc, {}});
        } else if (body.rfind("sub:", 0) == 0) {
            if (t.categories.empty())
                throw ParseError("subcategory before any category", line_no);
            auto [name, desc] = split_entry(body.substr(4), line_no);
            if (!names.insert(name).second)
                throw ParseError("duplicate taxonomy name \"" + name + "\"", line_no);
            t.categories.back().subcategories.push_back({name, desc});
        } else {
            throw ParseError("expected `category:` or `sub:` entry", line_no);
        }
    }
    if (t.categories.empty()) throw ParseError("taxonomy file defines no categories");
    for (const auto& cat : t.categories)
        if (cat.subcategories.empty())
            throw ParseError("category \"" + cat.name + "\" has no subcategories");
    return t;
}

Taxonomy load_taxonomy_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open taxonomy file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_taxonomy(buf.str());
}

} // namespace perfminer
