#pragma once

#include <stdexcept>
#include <string>

namespace teampulse {

/// Base class for all engine errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input bytes. Carries the byte offset where parsing stopped.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t byte_offset)
        : Error(what + " (byte " + std::to_string(byte_offset) + ")"),
          byte_offset_(byte_offset) {}
    std::size_t byte_offset() const { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

/// Structurally valid input that violates the schema (e.g. unknown sender).
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Lookup of an entity that does not exist (member, task, template).
class NotFoundError : public Error {
public:
    using Error::Error;
};

/// Bad or missing configuration: files, credentials, thresholds.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A transcript too degenerate to analyze (no messages, zero words).
class DegenerateTranscriptError : public Error {
public:
    using Error::Error;
};

/// Prompt rendering failed; names the offending placeholder.
class RenderError : public Error {
public:
    RenderError(const std::string& what, std::string placeholder)
        : Error(what), placeholder_(std::move(placeholder)) {}
    const std::string& placeholder() const { return placeholder_; }

private:
    std::string placeholder_;
};

/// LLM backend failure after the retry policy is exhausted.
class BackendError : public Error {
public:
    enum class Kind { timeout, http, malformed_response, credential_missing };

    BackendError(Kind kind, const std::string& what, int http_status = 0)
        : Error(what), kind_(kind), http_status_(http_status) {}
    Kind kind() const { return kind_; }
    int http_status() const { return http_status_; }

private:
    Kind kind_;
    int http_status_;
};

}  // namespace teampulse
