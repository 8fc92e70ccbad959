#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bnp {

// Base class for every domain error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input: duplicate tx ids, out-of-range parameters,
// records that violate the schema.
struct ValidationError : Error {
    using Error::Error;
};

// A scenario referenced a transaction id that is not in the pool.
struct UnknownTxError : ValidationError {
    using ValidationError::ValidationError;
};

// Payoff evaluation needed a true value the bid does not carry.
struct MissingTrueValueError : ValidationError {
    using ValidationError::ValidationError;
};

// The requested "deviation" equals the honest bid, so there is nothing to
// evaluate against.
struct NotADeviationError : ValidationError {
    using ValidationError::ValidationError;
};

// A miner fake bid priced below the bottom of the padded window. Such a bid
// can only lower revenue, so the evaluator refuses it outright.
struct DominatedBidError : ValidationError {
    using ValidationError::ValidationError;
};

// A collusion target that already wins at its honest amount has nothing to
// buy; raising it is not a coalition deviation.
struct AlreadyWinningError : ValidationError {
    using ValidationError::ValidationError;
};

// A future-cost model was built with an out-of-range parameter.
struct ModelParameterError : ValidationError {
    using ValidationError::ValidationError;
};

// An audit search would exceed its evaluation budget. Carries the numbers so
// callers can report exactly how far out of reach the request was.
struct InfeasibleSearchError : Error {
    std::uint64_t required_evals;
    std::uint64_t limit;

    InfeasibleSearchError(std::uint64_t required, std::uint64_t lim)
        : Error("audit search infeasible: needs " + std::to_string(required) +
                " evaluations, limit is " + std::to_string(lim)),
          required_evals(required),
          limit(lim) {}
};

// Dataset file carries a schema version this build does not understand.
struct SchemaVersionError : Error {
    int found;
    int supported;

    SchemaVersionError(int found_version, int supported_version)
        : Error("unsupported dataset schema version " + std::to_string(found_version) +
                " (this build reads version " + std::to_string(supported_version) + ")"),
          found(found_version),
          supported(supported_version) {}
};

// Dataset file ends mid-record. byte_offset points at the start of the
// truncated line.
struct TruncatedFileError : Error {
    std::uint64_t byte_offset;

    explicit TruncatedFileError(std::uint64_t offset)
        : Error("dataset file truncated mid-record at byte offset " + std::to_string(offset)),
          byte_offset(offset) {}
};

// A dataset line failed to parse. line is 1-based.
struct ParseError : Error {
    std::uint64_t line;

    ParseError(std::uint64_t line_number, const std::string& what_failed)
        : Error("dataset parse error on line " + std::to_string(line_number) + ": " + what_failed),
          line(line_number) {}
};

// RPC transport failure that survived every retry.
struct NetworkError : Error {
    using Error::Error;
};

}  // namespace bnp
