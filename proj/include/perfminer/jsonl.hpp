#pragma once

#include "perfminer/commit.hpp"

#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace perfminer {

// Serializes one record to a single JSON line (no trailing newline).
std::string record_to_json_line(const CommitRecord& record);

// Validates and writes records as JSONL. Returns the number of lines written.
std::size_t write_records(std::span<const CommitRecord> records, std::ostream& sink);

// Streaming JSONL reader; memory use is bounded by the longest line, not the
// record count. Lines holding a "_provenance" object (emitted by CLI tools as
// an artifact header) are skipped. Unknown fields are ignored.
class RecordReader {
public:
    explicit RecordReader(std::istream& source) : source_(source) {}

    // Returns false at end of input. Throws ParseError with the 1-based
    // line number on malformed lines.
    bool next(CommitRecord& out);

    long line() const { return line_; }

private:
    std::istream& source_;
    long line_ = 0;
};

// Convenience: read everything into memory.
std::vector<CommitRecord> read_records(std::istream& source);

// Calls fn per record without materializing the sequence.
void for_each_record(std::istream& source, const std::function<void(const CommitRecord&)>& fn);

} // namespace perfminer
