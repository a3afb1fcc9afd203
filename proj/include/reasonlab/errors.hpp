#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace reasonlab {

// Base class for all errors raised by the library. Partiality of the
// inference/generation maps is NOT an error (see partial.hpp); these are
// reserved for contract violations and malformed input.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A phenomenon handed to infer() or roundtrip_discrepancy() that the
// phenomenon space rejects.
struct InadmissibleInput : Error {
    using Error::Error;
};

// A pair-scoped principle was checked without its phenomenon.
struct MissingContext : Error {
    using Error::Error;
};

// Out-of-range tolerance, classifier, scenario, or policy configuration.
struct ConfigError : Error {
    using Error::Error;
};

// adapt() called on a system without an adapter hook.
struct NoAdapter : Error {
    using Error::Error;
};

// An adaptation round produced non-finite values; the update is discarded
// before this is thrown, so the model stays at its last good state.
struct NonFiniteUpdate : Error {
    using Error::Error;
};

// classify_response_mode() needs at least two epochs.
struct InsufficientLog : Error {
    using Error::Error;
};

// A Relax drift action fired but no violated principle exists to demote or drop.
struct EmptyRelaxation : Error {
    using Error::Error;
};

// Formula text rejected by the propositional grammar.
struct ParseError : Error {
    ParseError(std::string message, std::size_t offset, std::string expected)
        : Error(std::move(message)), offset(offset), expected(std::move(expected)) {}

    std::size_t offset;   // byte offset of the offending token
    std::string expected; // human-readable expected-token set
};

// Truth-table oracle limit (2^atoms enumeration) exceeded.
struct TooManyAtoms : Error {
    using Error::Error;
};

// Support index outside the original premise list.
struct IndexOutOfRange : Error {
    using Error::Error;
};

// Vector/matrix shapes disagree.
struct DimensionMismatch : Error {
    using Error::Error;
};

// reconstruct_problem() requires a converged solution.
struct NotConverged : Error {
    using Error::Error;
};

} // namespace reasonlab
