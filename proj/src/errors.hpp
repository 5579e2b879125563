#pragma once

#include <stdexcept>
#include <string>

namespace toda {

/// Base of every exception thrown by the numerical core. The C API maps each
/// subclass onto its own status code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid caller input: wrong sizes, out-of-range indices, malformed signs.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Phase-space input outside the representable domain (b_j overflow).
class DomainError : public Error {
public:
    DomainError(const std::string& what, int index) : Error(what), index_(index) {}
    /// Zero-based index of the offending coordinate or bond.
    int index() const noexcept { return index_; }

private:
    int index_;
};

/// Eigensolver failure, forbidden degeneracy pattern, rank deficiency where the
/// theory rules it out.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Frozen eigenframe no longer tracks the current eigenspaces.
class FrameValidityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Iterative solver or curve refinement gave up.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent configuration / request document.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace toda
