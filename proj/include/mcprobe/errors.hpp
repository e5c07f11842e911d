#pragma once

#include <stdexcept>
#include <string>

namespace mcprobe {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (topology files, config files).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Input parsed but violates a model invariant (disconnected, self-loop, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Parameters that cannot be honoured (bad threshold, T2 at a degree-1 node, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Algorithm precondition violated on a structurally unsuitable graph.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of an analytic formula.
class DomainError : public Error {
public:
    using Error::Error;
};

}  // namespace mcprobe
