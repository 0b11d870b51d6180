#pragma once

#include <stdexcept>
#include <string>

namespace hyiga {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parametric coordinate outside the knot range, or sampling outside an element.
class DomainError : public Error {
public:
    using Error::Error;
};

class RefinementError : public Error {
public:
    using Error::Error;
};

// Invalid material, unsupported degree, malformed run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Inverted or degenerate element geometry.
class MeshError : public Error {
public:
    using Error::Error;
};

class ElementError : public Error {
public:
    using Error::Error;
};

// H not positive definite: rank-deficient stress basis or degenerate geometry.
class FormulationError : public Error {
public:
    using Error::Error;
};

class SingularSystemError : public Error {
public:
    SingularSystemError(const std::string& what, long dof) : Error(what), dof_(dof) {}
    long dof() const noexcept { return dof_; }

private:
    long dof_;
};

// Bad user input (non-finite traction, bad fixture file, ...).
class InputError : public Error {
public:
    using Error::Error;
};

}  // namespace hyiga
