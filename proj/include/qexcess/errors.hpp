#pragma once

#include <stdexcept>
#include <string>

namespace qexcess {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Physical parameters violate a model invariant (mass <= 0, |normalized coupling| >= 1, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public Error {
public:
    using Error::Error;
};

class DegenerateFormError : public Error {
public:
    using Error::Error;
};

class RootFindingError : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    using Error::Error;
};

class OdeError : public Error {
public:
    using Error::Error;
};

// Malformed configuration text. line() is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(const std::string& source, int line, const std::string& message)
        : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message),
          line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

} // namespace qexcess
