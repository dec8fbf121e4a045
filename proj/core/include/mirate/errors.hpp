#pragma once

#include <stdexcept>
#include <string>

namespace mirate {

/// Caller broke an interface contract (shape mismatch, out-of-range label, ...).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A scalar parameter is outside its admissible range.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Mathematical function evaluated outside its domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

enum class ParseErrorKind { io, bad_magic, truncated, count_mismatch, corrupt };

/// Failure while reading a binary or textual artifact from disk.
class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ParseErrorKind kind() const noexcept { return kind_; }

private:
    ParseErrorKind kind_;
};

/// Invalid run configuration; names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace mirate
