#ifndef MRLGP_ERRORS_HPP
#define MRLGP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mrlgp {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid parameter or model configuration (non-positive length scale,
// unordered boundaries, degenerate model, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Numerical failure (factorization failed after jitter escalation).
class NumericError : public Error {
public:
    using Error::Error;
};

// Operation not available for the given kernel family.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

// Inference produced no usable result (e.g. all sample weights -inf).
class InferenceError : public Error {
public:
    using Error::Error;
};

}  // namespace mrlgp

#endif
