#pragma once

#include "perfminer/commit.hpp"
#include "perfminer/diff.hpp"
#include "perfminer/digest.hpp"

#include <functional>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace perfminer {

using CommitClassifier = std::function<HardLabel(const std::string&)>;

struct MinerConfig {
    std::set<Language> languages = {Language::Python, Language::Cpp, Language::Java};
    std::uint64_t min_stars = 20;
    std::size_t max_functions_changed = 1;
    std::string branch = "main";  // falls back to master when absent
    CommitClassifier classifier;
    unsigned workers = 1;
};

// Set of dedup digests; serializable as sorted hex, one per line.
class DedupIndex {
public:
    // False when the digest was already present.
    bool insert(const digest::Md5Digest& d) { return digests_.insert(d.hex()).second; }
    bool contains(const digest::Md5Digest& d) const { return digests_.count(d.hex()) > 0; }
    std::size_t size() const { return digests_.size(); }

    void write(std::ostream& out) const;
    static DedupIndex read(std::istream& in);

private:
    std::set<std::string> digests_;
};

// Strips every newline, carriage return, tab and space; all other bytes kept
// in order.
std::string normalize_code(std::string_view text);

// MD5 over normalize(before) || 0x00 || normalize(after). The separator keeps
// ("a","b") and ("ab","") distinct.
digest::Md5Digest dedup_key(std::string_view before, std::string_view after);

struct RepoInfo {
    std::string repo_id;  // owner/name
    std::uint64_t stars = 0;
};

struct MineSkip {
    std::string commit_sha;
    std::string reason;
};

struct MineLog {
    std::vector<MineSkip> skipped;
};

// Walks first-parent history of the configured branch oldest to newest,
// keeps single-function commits in the configured languages whose message the
// classifier flags as Performance, extracts before/after function text from
// the parent and child blobs, and drops dedup-key duplicates. Extraction
// failures skip the commit with a logged reason; they never abort the repo.
std::vector<CommitRecord> mine_repository(const std::string& repo_path, const MinerConfig& config,
                                          DedupIndex& index, const RepoInfo& info,
                                          MineLog* log = nullptr);

struct MergeResult {
    std::size_t records = 0;
    std::size_t dropped_duplicates = 0;
};

// Streams shards in the given order keeping the first record per dedup key;
// output order is first-occurrence order. Malformed shards raise ParseError
// naming the file and line.
MergeResult merge_shards(std::span<const std::string> shard_paths, std::ostream& out);

} // namespace perfminer
