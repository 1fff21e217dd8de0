#pragma once

#include <stdexcept>
#include <string>

namespace roadfirst {

// Base class for all library errors. `code` mirrors the C API status values
// so the extern-C layer can translate without a taxonomy of catch blocks.
class Error : public std::runtime_error {
public:
    Error(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
    int code() const noexcept { return code_; }

private:
    int code_;
};

// Bad arguments, violated preconditions, invalid config values.
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error(1, what) {}
};

// Filesystem problems: missing file, unreadable, unwritable.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(2, what) {}
};

// Malformed input content (CSV cells, JSON documents, model files).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(3, what) {}
};

// Schema/frame contract violations: unknown columns, role mismatches,
// duplicate identifiers, overlapping segments.
class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& what) : Error(4, what) {}
};

// Numeric failures: rank deficiency, degenerate class distributions.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(6, what) {}
};

}  // namespace roadfirst
