#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fredop {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// expr

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t position, const std::string& what)
        : Error("syntax error at position " + std::to_string(position) + ": " + what),
          position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class UnknownIdentifier : public Error {
public:
    UnknownIdentifier(std::size_t position, const std::string& name)
        : Error("unknown identifier '" + name + "' at position " + std::to_string(position)),
          position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class MissingBinding : public Error {
public:
    using Error::Error;
};

class NumericDomainError : public Error {
public:
    using Error::Error;
};

// grid

class InvalidDomain : public Error {
public:
    using Error::Error;
};

class UnsupportedDimension : public Error {
public:
    using Error::Error;
};

class GridMismatch : public Error {
public:
    GridMismatch() : Error("grid function does not belong to this grid") {}
};

class EmptyFunction : public Error {
public:
    EmptyFunction() : Error("empty grid function") {}
};

// operators

class KernelUsesU : public Error {
public:
    KernelUsesU() : Error("linear kernel must not depend on u") {}
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

class DerivativeMismatch : public Error {
public:
    using Error::Error;
};

class MissingHammerstein : public Error {
public:
    MissingHammerstein() : Error("problem has no Hammerstein kernel") {}
};

}  // namespace fredop
