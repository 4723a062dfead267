#pragma once

#include <stdexcept>
#include <string>

namespace ratchet {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid experiment or module configuration. `path()` names the offending
/// field (e.g. "params.gamma") when one is known.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& message, std::string path = {})
        : std::runtime_error(path.empty() ? message : path + ": " + message),
          path_(std::move(path)) {}

    [[nodiscard]] const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// A bisection was asked to search an interval whose ends do not straddle
/// the abandonment boundary.
class NotBracketedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientSamplesError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace ratchet
