#pragma once

#include <stdexcept>
#include <string>

namespace kakeya {

/// Base for every error raised by the library. Caller-side misuse (bad
/// parameters, malformed files) maps to InvalidInput and its subclasses.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class ModulusMismatch : public InvalidInput {
public:
    explicit ModulusMismatch(unsigned long long lhs, unsigned long long rhs)
        : InvalidInput("modulus mismatch: " + std::to_string(lhs) + " vs " + std::to_string(rhs)) {}
};

/// A slope for which the requested dual or linear identity does not exist.
class ExceptionalSlope : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// Two configuration points share a value of pi_{-1}.
class InjectivityViolation : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class DegenerateInstance : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// Slope-tree construction could not avoid all coincidences in the field.
class FieldTooSmall : public Error {
public:
    using Error::Error;
};

/// The density is small enough that the two-slice (bush) bound already applies.
class BushBranchApplies : public Error {
public:
    using Error::Error;
};

class TwoEndsFailed : public Error {
public:
    using Error::Error;
};

/// A pigeonhole selection found nothing to select; `step` names the stage.
class PigeonholeEmpty : public Error {
public:
    PigeonholeEmpty(std::string step, const std::string& what)
        : Error("pigeonhole step '" + step + "' is empty: " + what), step_(std::move(step)) {}
    const std::string& step() const noexcept { return step_; }

private:
    std::string step_;
};

}  // namespace kakeya
