#pragma once

#include <stdexcept>
#include <string>

namespace rwave {

// Thrown on precondition violations of library operations.
using InvalidArgument = std::invalid_argument;

// Field magnitude exceeded the blow-up threshold or became non-finite.
// Defocusing runs are global in time, so this always indicates a numerical
// failure (bad CFL, bad config), never physics.
class NumericalBlowup : public std::runtime_error {
public:
    NumericalBlowup(const std::string& what, long step) : std::runtime_error(what), step_(step) {}
    long step() const { return step_; }

private:
    long step_;
};

// Picard iteration gaps grew for several consecutive iterations:
// the requested interval is too long for the fixed-point map to contract.
class NoContraction : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A chart node maps outside the stored space-time window of a trajectory.
class CoverageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Configuration file problem; message carries the offending field path.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rwave
