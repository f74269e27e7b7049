#pragma once

#include <stdexcept>
#include <string>

namespace thinfilm {

// Invalid user-facing parameters (grid sizes, scenario configs, CLI input).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A field violated the strict positivity the degenerate mobility requires.
class DegeneracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The adaptive stepper could not maintain positivity even at dt_min: the
// film touched down (or the scheme cannot distinguish the run from one that
// does).  Carries the simulation time at which integration stopped.
class TouchdownError : public std::runtime_error {
public:
    TouchdownError(double t, const std::string& what)
        : std::runtime_error(what), time_(t) {}
    double time() const { return time_; }

private:
    double time_;
};

// The error estimate (or the energy guard) still failed at dt_min.
class StiffnessError : public std::runtime_error {
public:
    StiffnessError(double t, const std::string& what)
        : std::runtime_error(what), time_(t) {}
    double time() const { return time_; }

private:
    double time_;
};

// A diagnostic was asked about a time range the trajectory does not cover.
class CoverageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Not enough (or degenerate) data for a least-squares fit.
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or unreadable artifact files (CSV, JSON, field snapshots).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace thinfilm
