#pragma once

#include <stdexcept>
#include <string>

namespace perfminer {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A domain invariant was violated; message names the offending field.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Bad configuration (flags, files, thresholds out of range).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed input; carries a 1-based line number when one is known.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what, long line = 0)
        : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    long line() const { return line_; }

private:
    long line_ = 0;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Gateway transport failure. Permanent errors (4xx) must not be retried.
class TransportError : public Error {
public:
    explicit TransportError(const std::string& what, bool permanent = false)
        : Error(what), permanent_(permanent) {}
    bool permanent() const { return permanent_; }

private:
    bool permanent_ = false;
};

// Single-class or empty training data.
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

// A long run stopped mid-way but its on-disk checkpoint allows resuming.
class ResumableError : public Error {
public:
    using Error::Error;
};

} // namespace perfminer
