#pragma once

#include <cstddef>
#include <exception>
#include <stdexcept>
#include <string>

namespace nvcom {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter or config value failed validation. `field()` names the offending key.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Probability weight pushed past the Fock cutoff exceeded the hard limit.
class TruncationError : public Error {
public:
    TruncationError(double leakage, const std::string& what)
        : Error(what), leakage_(leakage) {}
    double leakage() const noexcept { return leakage_; }

private:
    double leakage_;
};

/// The analytic propagator was handed a state with no coherent-state expansion.
class UnsupportedStateError : public Error {
public:
    using Error::Error;
};

class NormError : public Error {
public:
    using Error::Error;
};

/// Spin coherence too small for its argument to carry a phase.
class PhaseUndefinedError : public Error {
public:
    using Error::Error;
};

/// Wraps a failure raised while evolving a protocol, tagged with the time-sample index.
class ProtocolError : public Error {
public:
    ProtocolError(std::size_t sample_index, std::exception_ptr cause, const std::string& what)
        : Error("sample " + std::to_string(sample_index) + ": " + what),
          sample_index_(sample_index), cause_(std::move(cause)) {}
    std::size_t sample_index() const noexcept { return sample_index_; }
    std::exception_ptr cause() const noexcept { return cause_; }

private:
    std::size_t sample_index_;
    std::exception_ptr cause_;
};

}  // namespace nvcom
