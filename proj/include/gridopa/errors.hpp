#pragma once

#include <stdexcept>
#include <string>

namespace gridopa {

/// Input file could not be parsed.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parsed data violates a model invariant.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scenario or sweep configuration is inconsistent.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation was called outside its contract.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A numerical routine failed in a way that indicates a solver bug.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace gridopa
