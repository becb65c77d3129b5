#pragma once

#include <stdexcept>
#include <string>

namespace scisimp {

// Base for all library errors so the CLI can map them to exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line)
        : Error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class DuplicateIdError : public Error {
public:
    explicit DuplicateIdError(const std::string& id)
        : Error("duplicate record id: " + id) {}
};

class EmptyCorpusError : public Error {
public:
    EmptyCorpusError() : Error("corpus contains no documents") {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error("config: " + msg) {}
};

class AlignmentError : public Error {
public:
    explicit AlignmentError(const std::string& msg) : Error("alignment: " + msg) {}
};

class IncompleteManifestError : public Error {
public:
    explicit IncompleteManifestError(const std::string& msg)
        : Error("incomplete manifest: " + msg) {}
};

class EmptyReferenceSetError : public Error {
public:
    EmptyReferenceSetError() : Error("evaluation instance has no references") {}
};

// Infrastructure failures from LLM providers. Kept separate from parse
// failures: a provider hard-failure aborts a run instead of counting as a
// modification failure.
class ProviderError : public Error {
public:
    ProviderError(const std::string& msg, int http_status = 0)
        : Error("provider: " + msg), http_status_(http_status) {}
    int http_status() const { return http_status_; }

private:
    int http_status_;
};

class TimeoutError : public ProviderError {
public:
    explicit TimeoutError(const std::string& msg) : ProviderError("timeout: " + msg) {}
};

class AuthMissingError : public ProviderError {
public:
    explicit AuthMissingError(const std::string& var)
        : ProviderError("API key environment variable not set: " + var) {}
};

}  // namespace scisimp
