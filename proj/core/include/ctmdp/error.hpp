#pragma once

#include <stdexcept>
#include <string>

namespace ctmdp {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: malformed files, violated preconditions, misuse of an agent.
class InputError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed to produce a certified answer.
class NumericalError : public Error {
public:
    using Error::Error;
};

class ModelFormatError : public InputError {
public:
    using InputError::InputError;
};

class InvalidDelta : public InputError {
public:
    explicit InvalidDelta(double delta)
        : InputError("confidence parameter delta must lie in (0,1), got " + std::to_string(delta)) {}
};

class NoSamples : public InputError {
public:
    NoSamples() : InputError("no holding-time samples recorded for this state-action pair") {}
};

class EmptyInterval : public InputError {
public:
    EmptyInterval(double lo, double hi)
        : InputError("empty rate interval [" + std::to_string(lo) + ", " + std::to_string(hi) + "]") {}
};

class OutOfOrderObservation : public InputError {
public:
    using InputError::InputError;
};

class SupportMismatch : public InputError {
public:
    using InputError::InputError;
};

class NonpositiveRate : public InputError {
public:
    using InputError::InputError;
};

class NotSuboptimal : public InputError {
public:
    using InputError::InputError;
};

class IterationLimitExceeded : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularChain : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class PolicySpaceTooLarge : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace ctmdp
