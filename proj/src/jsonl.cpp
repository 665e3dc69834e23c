#include "perfminer/jsonl.hpp"

#include "perfminer/errors.hpp"

#include <json.hpp>

namespace perfminer {

using nlohmann::json;

std::string record_to_json_line(const CommitRecord& r) {
    json j;
    j["repo_id"] = r.repo_id;
    j["commit_sha"] = r.commit_sha;
    j["message"] = r.message;
    j["language"] = to_string(r.language);
    j["files_changed"] = r.files_changed;
    j["functions_changed"] = r.functions_changed;
    j["function_before"] = r.function_before;
    j["function_after"] = r.function_after;
    j["diff"] = r.diff;
    j["stars"] = r.stars;
    j["committed_at"] = r.committed_at;
    return j.dump();
}

std::size_t write_records(std::span<const CommitRecord> records, std::ostream& sink) {
    std::size_t written = 0;
    for (const CommitRecord& r : records) {
        validate(r);
        sink << record_to_json_line(r) << '\n';
        if (!sink) throw IoError("write_records: stream write failed after " +
                                 std::to_string(written) + " records");
        ++written;
    }
    return written;
}

namespace {

CommitRecord record_from_json(const json& j, long line) {
    try {
        CommitRecord r;
        r.repo_id = j.at("repo_id").get<std::string>();
        r.commit_sha = j.at("commit_sha").get<std::string>();
        r.message = j.at("message").get<std::string>();
        r.language = language_from_string(j.at("language").get<std::string>());
        r.files_changed = j.at("files_changed").get<std::uint64_t>();
        r.functions_changed = j.at("functions_changed").get<std::uint64_t>();
        r.function_before = j.at("function_before").get<std::string>();
        r.function_after = j.at("function_after").get<std::string>();
        r.diff = j.at("diff").get<std::string>();
        r.stars = j.at("stars").get<std::uint64_t>();
        r.committed_at = j.at("committed_at").get<std::string>();
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("record field error: ") + e.what(), line);
    } catch (const ValidationError& e) {
        throw ParseError(std::string("record field error: ") + e.what(), line);
    }
}

} // namespace

bool RecordReader::next(CommitRecord& out) {
    std::string buf;
    while (std::getline(source_, buf)) {
        ++line_;
        if (buf.empty()) continue;
        json j = json::parse(buf, nullptr, false);
        if (j.is_discarded()) throw ParseError("malformed JSON", line_);
        if (!j.is_object()) throw ParseError("expected a JSON object", line_);
        if (j.contains("_provenance")) continue;
        out = record_from_json(j, line_);
        return true;
    }
    return false;
}

std::vector<CommitRecord> read_records(std::istream& source) {
    std::vector<CommitRecord> out;
    RecordReader reader(source);
    CommitRecord r;
    while (reader.next(r)) out.push_back(std::move(r));
    return out;
}

void for_each_record(std::istream& source, const std::function<void(const CommitRecord&)>& fn) {
    RecordReader reader(source);
    CommitRecord r;
    while (reader.next(r)) fn(r);
}

} // namespace perfminer
