#include "perfminer/miner.hpp"

#include "perfminer/errors.hpp"
#include "perfminer/jsonl.hpp"
#include "perfminer/subprocess.hpp"

#include <ctime>
#include <fstream>
#include <sstream>

namespace perfminer {

void DedupIndex::write(std::ostream& out) const {
    for (const std::string& hex : digests_) out << hex << '\n';  // std::set keeps them sorted
    if (!out) throw IoError("DedupIndex::write: stream write failed");
}

DedupIndex DedupIndex::read(std::istream& in) {
    DedupIndex index;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.size() != 32 || line.find_first_not_of("0123456789abcdef") != std::string::npos)
            throw ParseError("not an MD5 hex digest: " + line, line_no);
        index.digests_.insert(line);
    }
    return index;
}

std::string normalize_code(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text)
        if (c != '\n' && c != '\r' && c != '\t' && c != ' ') out.push_back(c);
    return out;
}

digest::Md5Digest dedup_key(std::string_view before, std::string_view after) {
    std::string payload = normalize_code(before);
    payload.push_back('\0');
    payload += normalize_code(after);
    return digest::md5(payload);
}

// ------------------------------------------------------------- git layer ----

namespace {

constexpr const char* kEmptyTree = "4b825dc642cb6eb9a060e54bf8d69288fbee4904";

std::string git_or_throw(const std::string& repo, const std::vector<std::string>& args,
                         const std::string& what) {
    std::vector<std::string> argv = {"git", "-C", repo};
    argv.insert(argv.end(), args.begin(), args.end());
    CommandResult r = run_command(argv);
    if (!r.ok()) throw IoError(what + " failed: " + r.err);
    return r.out;
}

bool git_ref_exists(const std::string& repo, const std::string& ref) {
    CommandResult r = run_command({"git", "-C", repo, "rev-parse", "--verify", "--quiet", ref});
    return r.ok();
}

// Blob content at <rev>:<path>, empty when the file does not exist there.
std::string git_blob(const std::string& repo, const std::string& rev, const std::string& path) {
    CommandResult r = run_command({"git", "-C", repo, "show", rev + ":" + path});
    return r.ok() ? r.out : std::string();
}

std::string iso_utc_from_unix(long long ts) {
    std::time_t t = static_cast<std::time_t>(ts);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string chomp(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

} // namespace

std::vector<CommitRecord> mine_repository(const std::string& repo_path, const MinerConfig& config,
                                          DedupIndex& index, const RepoInfo& info, MineLog* log) {
    if (config.languages.empty()) throw ConfigError("miner: languages must be non-empty");
    if (config.max_functions_changed == 0)
        throw ConfigError("miner: max_functions_changed must be >= 1");
    if (!config.classifier) throw ConfigError("miner: no classifier configured");

    // The master fallback covers older default branches; an explicitly
    // configured branch must exist as given.
    std::string branch = config.branch;
    if (!git_ref_exists(repo_path, branch)) {
        if (branch == "main" && git_ref_exists(repo_path, "master")) {
            branch = "master";
        } else if (branch == "main") {
            throw IoError("repository " + repo_path + " has neither branch \"main\" nor \"master\"");
        } else {
            throw IoError("repository " + repo_path + " has no branch \"" + config.branch + "\"");
        }
    }

    std::string rev_list =
        git_or_throw(repo_path, {"rev-list", "--first-parent", "--reverse", branch}, "rev-list");

    auto skip = [&](const std::string& sha, std::string reason) {
        if (log) log->skipped.push_back({sha, std::move(reason)});
    };

    std::vector<CommitRecord> records;
    std::istringstream shas(rev_list);
    std::string sha;
    while (std::getline(shas, sha)) {
        if (sha.empty()) continue;

        std::string parent = sha + "^";
        if (!git_ref_exists(repo_path, parent)) parent = kEmptyTree;

        std::string diff;
        try {
            diff = git_or_throw(repo_path,
                                {"diff", "--no-color", "--no-ext-diff", "--unified=3", parent, sha},
                                "diff");
        } catch (const IoError& e) {
            skip(sha, e.what());
            continue;
        }
        if (diff.empty()) {
            skip(sha, "empty diff");
            continue;
        }

        std::vector<DiffFile> files;
        FunctionCount fc;
        try {
            files = parse_unified_diff(diff);
            fc = count_changed_functions(files);
        } catch (const ParseError& e) {
            skip(sha, std::string("diff parse: ") + e.what());
            continue;
        }
        if (fc.count == 0) {
            skip(sha, "no hunks");
            continue;
        }
        if (fc.count > config.max_functions_changed) {
            skip(sha, "tangled: touches " + std::to_string(fc.count) + " functions");
            continue;
        }

        const FunctionChange& change = fc.changes.front();
        std::optional<Language> lang = language_from_path(change.file_path);
        if (!lang || !config.languages.count(*lang)) {
            skip(sha, "language gate: " + change.file_path);
            continue;
        }
        if (change.function_name.empty()) {
            skip(sha, "no function attribution in " + change.file_path);
            continue;
        }

        std::string message = chomp(git_or_throw(repo_path, {"log", "-1", "--format=%B", sha}, "log"));
        if (config.classifier(message) != HardLabel::Performance) continue;

        std::string before_src = parent == kEmptyTree ? std::string()
                                                      : git_blob(repo_path, parent, change.file_path);
        std::string after_src = git_blob(repo_path, sha, change.file_path);
        std::string before_fn =
            extract_function(before_src, change.function_name, *lang).value_or("");
        std::string after_fn = extract_function(after_src, change.function_name, *lang).value_or("");
        if (before_fn.empty() && after_fn.empty()) {
            skip(sha, "extraction failed for " + change.function_name);
            continue;
        }
        if (before_fn == after_fn) {
            skip(sha, "function text unchanged: " + change.function_name);
            continue;
        }

        if (!index.insert(dedup_key(before_fn, after_fn))) continue;  // duplicate change

        CommitRecord record;
        record.repo_id = info.repo_id;
        record.commit_sha = sha;
        record.message = message;
        record.language = *lang;
        record.files_changed = files.size();
        record.functions_changed = fc.count;
        record.function_before = before_fn;
        record.function_after = after_fn;
        record.diff = diff;
        record.stars = info.stars;
        long long ts = std::stoll(
            chomp(git_or_throw(repo_path, {"log", "-1", "--format=%ct", sha}, "log")));
        record.committed_at = iso_utc_from_unix(ts);

        try {
            validate(record);
        } catch (const ValidationError& e) {
            skip(sha, std::string("record invalid: ") + e.what());
            continue;
        }
        records.push_back(std::move(record));
    }
    return records;
}

MergeResult merge_shards(std::span<const std::string> shard_paths, std::ostream& out) {
    MergeResult result;
    DedupIndex index;
    for (const std::string& path : shard_paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open shard: " + path);
        RecordReader reader(in);
        CommitRecord record;
        for (;;) {
            try {
                if (!reader.next(record)) break;
            } catch (const ParseError& e) {
                throw ParseError(path + ": " + e.what());
            }
            if (index.insert(dedup_key(record.function_before, record.function_after))) {
                out << record_to_json_line(record) << '\n';
                ++result.records;
            } else {
                ++result.dropped_duplicates;
            }
        }
    }
    if (!out) throw IoError("merge_shards: stream write failed");
    return result;
}

} // namespace perfminer
