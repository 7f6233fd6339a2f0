#pragma once

#include <stdexcept>
#include <string>

namespace tleval {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input or configuration problems the caller can fix (bad flags, missing secrets).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Failures that belong to an evaluation run (bad artifact, replay miss, missing truth).
class EvaluationError : public Error {
public:
    using Error::Error;
};

} // namespace tleval
