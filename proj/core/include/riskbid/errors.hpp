// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace riskbid {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Input / configuration errors. The caller handed us something malformed.
// ---------------------------------------------------------------------------

class InputError : public Error {
public:
    using Error::Error;
};

class ConfigError : public InputError {
public:
    using InputError::InputError;
};

class InvalidProblem : public InputError {
public:
    using InputError::InputError;
};

class BidOrderError : public InputError {
public:
    using InputError::InputError;
};

class PreconditionError : public InputError {
public:
    using InputError::InputError;
};

class OutsideOptionNotConstant : public InputError {
public:
    using InputError::InputError;
};

// ---------------------------------------------------------------------------
// Solver errors. Inputs were well formed but the numerics broke down.
// ---------------------------------------------------------------------------

class SolverError : public Error {
public:
    using Error::Error;
};

class DomainError : public SolverError {
public:
    using SolverError::SolverError;
};

class NonpositiveSurplus : public SolverError {
public:
    using SolverError::SolverError;
};

class SingularHazard : public SolverError {
public:
    using SolverError::SolverError;
};

class NonmonotoneSolution : public SolverError {
public:
    using SolverError::SolverError;
};

class BracketError : public SolverError {
public:
    using SolverError::SolverError;
};

class QuadratureError : public SolverError {
public:
    using SolverError::SolverError;
};

// ---------------------------------------------------------------------------
// Safety-relation preconditions.
// ---------------------------------------------------------------------------

enum class Dominance { None, ADominatesB, BDominatesA };

inline const char* to_string(Dominance d) {
    switch (d) {
        case Dominance::None: return "none";
        case Dominance::ADominatesB: return "a_dominates_b";
        case Dominance::BDominatesA: return "b_dominates_a";
    }
    return "unknown";
}

/// Raised when the safety relation is requested for a pair where one action
/// weakly dominates the other.
class DominancePrecondition : public Error {
public:
    DominancePrecondition(Dominance d, const std::string& what)
        : Error(what), dominance_(d) {}
    Dominance dominance() const noexcept { return dominance_; }

private:
    Dominance dominance_;
};

/// Both actions pay the same in every state.
class IdenticalActions : public Error {
public:
    using Error::Error;
};

}  // namespace riskbid
