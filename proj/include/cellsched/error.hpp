#pragma once

#include <stdexcept>
#include <string>

namespace cellsched {

/// Base class for everything the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model parameter is outside its admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A strategy needs information the simulation does not expose
/// (true file sizes for SRPT, a buffer model for SECTF).
class CapabilityError : public Error {
public:
    using Error::Error;
};

/// The scheduler picked a flow that cannot be served, or simulator state
/// became inconsistent.
class SchedulingError : public Error {
public:
    using Error::Error;
};

/// A metric or aggregate was requested over too few samples.
class MetricError : public Error {
public:
    using Error::Error;
};

/// Malformed experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace cellsched
