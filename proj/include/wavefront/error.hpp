#pragma once

#include <stdexcept>
#include <string>

namespace wavefront {

struct SourceLoc {
    int line = 0;
    int column = 0;
};

/// Base class for all library errors. `kind()` drives the CLI exit code.
class Error : public std::runtime_error {
public:
    enum class Kind { Parse, Domain, OrderExhausted, Corank, Numeric, Precondition };

    Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

class ParseError : public Error {
public:
    ParseError(SourceLoc loc, const std::string& msg)
        : Error(Kind::Parse, "line " + std::to_string(loc.line) + ", column " + std::to_string(loc.column) +
                                 ": " + msg),
          loc_(loc) {}

    SourceLoc location() const noexcept { return loc_; }

private:
    SourceLoc loc_;
};

/// Division by zero, log/sqrt outside the domain of the chosen field.
class DomainError : public Error {
public:
    DomainError(SourceLoc loc, const std::string& msg)
        : Error(Kind::Domain, msg + (loc.line > 0 ? " (at line " + std::to_string(loc.line) + ", column " +
                                                        std::to_string(loc.column) + ")"
                                                  : std::string{})),
          loc_(loc) {}

    SourceLoc location() const noexcept { return loc_; }

private:
    SourceLoc loc_;
};

class OrderExhausted : public Error {
public:
    explicit OrderExhausted(const std::string& msg) : Error(Kind::OrderExhausted, "order exhausted: " + msg) {}
};

class CorankTooHigh : public Error {
public:
    explicit CorankTooHigh(const std::string& msg) : Error(Kind::Corank, msg) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& msg) : Error(Kind::Numeric, msg) {}
};

class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& msg) : Error(Kind::Precondition, msg) {}
};

} // namespace wavefront
