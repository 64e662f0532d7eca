#pragma once

#include <stdexcept>
#include <string>

namespace dyadnet {

/// Precondition or range violation on an operation's inputs.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed run configuration; carries the 1-based line the problem was found on (0 if unknown).
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, int line)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
          line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

namespace detail {

[[noreturn]] inline void domain_fail(const std::string& what) { throw DomainError(what); }

inline void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

inline void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

}  // namespace detail
}  // namespace dyadnet
