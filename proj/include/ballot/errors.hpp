#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ballot {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A type invariant does not hold (sum mismatch, bad permutation, ...).
class InvariantViolation : public Error {
public:
    using Error::Error;
};

/// Malformed election file. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    explicit ParseError(const std::string& what) : Error(what), line_(0) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

class RuleInapplicable : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class SizeLimit : public Error {
public:
    using Error::Error;
};

class BudgetExceedsPopulation : public Error {
public:
    using Error::Error;
};

/// An iterative procedure ran past its configured floor or loop bound.
class IterationCap : public Error {
public:
    using Error::Error;
};

class NotSinglePeaked : public Error {
public:
    using Error::Error;
};

class Infeasible : public Error {
public:
    using Error::Error;
};

}  // namespace ballot
