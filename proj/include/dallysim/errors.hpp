#pragma once

#include <stdexcept>
#include <string>

namespace dallysim {

// Base class for all recoverable simulator errors. Engine-internal
// inconsistencies (ledger corruption, preempting a non-running job)
// throw std::logic_error instead: they indicate bugs, not bad input.
struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed domain object (empty placement, bad invariant).
struct ValidationError : SimError {
    using SimError::SimError;
};

// Malformed input file; message names the offending line.
struct ParseError : SimError {
    using SimError::SimError;
};

// Bad run configuration (zero bandwidth, unknown key, missing file).
struct ConfigError : SimError {
    using SimError::SimError;
};

// Trace references a model absent from the profile file.
struct MissingProfileError : SimError {
    using SimError::SimError;
};

// A job demands more GPUs than the whole cluster holds.
struct InfeasibleDemandError : SimError {
    using SimError::SimError;
};

// Simulated time exceeded the configured guard; message lists stuck jobs.
struct HorizonError : SimError {
    using SimError::SimError;
};

// Metrics finalization requested before every job completed.
struct IncompleteRunError : SimError {
    using SimError::SimError;
};

} // namespace dallysim
