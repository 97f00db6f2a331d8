#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace contactred {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t offset, const std::string& message)
        : Error("syntax error at byte " + std::to_string(offset) + ": " + message), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class UnknownIdentifier : public Error {
public:
    explicit UnknownIdentifier(std::string name)
        : Error("unknown identifier '" + name + "'"), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

/// Evaluation left the domain of an elementary function (log of a nonpositive
/// number, division by zero, even root of a negative number).
class DomainError : public Error {
public:
    explicit DomainError(std::string subtree, const std::string& what)
        : Error("domain error in '" + subtree + "': " + what), subtree_(std::move(subtree)) {}
    const std::string& subtree() const noexcept { return subtree_; }

private:
    std::string subtree_;
};

class ChartMismatch : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A linear system had no solution within the residual threshold.
class Inconsistent : public Error {
public:
    using Error::Error;
};

/// Input structure is not contact where a contact structure is required.
class NotContact : public Error {
public:
    using Error::Error;
};

}  // namespace contactred
