#pragma once

#include <stdexcept>
#include <string>

namespace franopt {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// -- model / queueing --------------------------------------------------------

/// M/M/1 queue with arrival rate at or above the service capacity.
struct UnstableQueue : Error {
    using Error::Error;
};

// -- milp ---------------------------------------------------------------------

struct InvalidBounds : Error {
    using Error::Error;
};

// -- formulation --------------------------------------------------------------

struct EmptyHostingSet : Error {
    using Error::Error;
};

struct UnroutableRequest : Error {
    using Error::Error;
};

/// Solution vector does not describe a one-hot assignment plus a simple
/// source-to-host path for every request.
struct CorruptSolution : Error {
    using Error::Error;
};

// -- solver -------------------------------------------------------------------

/// Simplex pivot magnitude fell below the hard floor with no alternative.
struct NumericalBreakdown : Error {
    using Error::Error;
};

// -- oracle -------------------------------------------------------------------

/// Enumeration guard tripped: |hosts|^|requests| exceeds the configured cap.
struct TooLarge : Error {
    using Error::Error;
};

/// Per-request minimum-energy routing violated joint link capacity; the
/// enumerator refuses to approximate coupled routing.
struct CapacityCoupling : Error {
    using Error::Error;
};

// -- scenarios ----------------------------------------------------------------

struct DivisionByZero : Error {
    using Error::Error;
};

// -- cli_io -------------------------------------------------------------------

struct ParseError : Error {
    using Error::Error;
};

struct SchemaError : Error {
    SchemaError(const std::string& key, const std::string& what)
        : Error(what), key_(key) {}
    const std::string& key() const { return key_; }

  private:
    std::string key_;
};

struct ValidationError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace franopt
