#pragma once

#include <stdexcept>
#include <string>

namespace oodkit {

// Root of every error the library raises deliberately. The CLI maps
// IoError and FormatError to exit code 2 and everything else to 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad argument, violated precondition or malformed configuration.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Missing decision threshold or similar setup omission.
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// A detector could not be fitted (missing block, singular covariance, ...).
class FitError : public Error {
public:
    using Error::Error;
};

// The gradient-descent trainer diverged.
class TrainingError : public Error {
public:
    using Error::Error;
};

// No sufficient representation exists for the requested alphabet size.
class InsufficientAlphabetError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// A statistical test is undefined for the given data (e.g. all-zero differences).
class UndefinedTestError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Method cannot consume the given feature set (e.g. MSP on logit-free features).
class NotApplicableError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    enum class Kind { BadMagic, BadVersion, SizeMismatch, DigestMismatch, NonFinite, BadSidecar };

    FormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

} // namespace oodkit
