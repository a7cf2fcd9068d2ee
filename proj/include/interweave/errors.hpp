#pragma once

#include <stdexcept>
#include <string>

namespace interweave {

// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Malformed or inconsistent configuration document.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// An internal invariant did not hold.
class InvariantBreach : public std::logic_error {
public:
    explicit InvariantBreach(const std::string& what) : std::logic_error(what) {}
};

} // namespace interweave
