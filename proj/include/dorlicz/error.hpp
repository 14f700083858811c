#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dorlicz {

// Base of every error thrown by the library. The CLI maps the subclasses to
// exit codes; callers that only care about failure can catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user input: unsupported (dimension, scheme) pair, singular map,
// malformed config field.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A value left the finite domain. Carries the grid node at fault when known.
class NumericalDomainError : public Error {
public:
    static constexpr std::size_t kNoNode = static_cast<std::size_t>(-1);

    explicit NumericalDomainError(const std::string& what, std::size_t node = kNoNode)
        : Error(node == kNoNode ? what : what + " (node " + std::to_string(node) + ")"),
          node_(node) {}

    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

// Body fails the star-body condition or the origin is not interior.
class InvalidBodyError : public Error {
public:
    using Error::Error;
};

// Representation not supported by the requested operation.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

// Violated precondition between arguments (class/sense mismatch etc.).
class ContractError : public Error {
public:
    using Error::Error;
};

class InvalidCompositionError : public Error {
public:
    using Error::Error;
};

class OptimizationError : public Error {
public:
    using Error::Error;
};

}  // namespace dorlicz
