#pragma once

#include <stdexcept>
#include <string>

namespace qred {

// Base class for all errors raised by the library. The CLI maps any
// Error to exit code 2 (usage/input error); plain `false` results are
// reported through return values, not exceptions.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input text or tables (bad JSON shape, unknown names, ...).
class ParseError : public Error {
public:
    using Error::Error;
};

// A type-level precondition failed: mismatched monoids, value outside a
// carrier, wrong system shape for an operation.
class TypeError : public Error {
public:
    using Error::Error;
};

// Degenerate behaviour types: empty label sets or trivial weight monoids.
class DegenerateTypeError : public Error {
public:
    using Error::Error;
};

// A value-level precondition failed (partition not covering the carrier,
// quotient by a non-bisimulation, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Configured resource limits exceeded: oracle carrier bound, approximant
// enumeration budget, arithmetic overflow of exact weights.
class LimitError : public Error {
public:
    using Error::Error;
};

} // namespace qred
