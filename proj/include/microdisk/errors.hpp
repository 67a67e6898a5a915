#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace microdisk
{

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the supported domain of a function (order, |z|, ...).
class RangeError : public Error
{
public:
    using Error::Error;
};

/// Evaluation at a singular point, e.g. a Hankel function at z = 0.
class SingularityError : public Error
{
public:
    using Error::Error;
};

/// Denominator of the dispersion relation vanished.
class PoleError : public Error
{
public:
    using Error::Error;
};

/// Iterative solver did not converge. Carries the last iterate.
class ConvergenceError : public Error
{
public:
    ConvergenceError(const std::string &what, std::complex<double> last_iterate, int iterations)
        : Error(what), last_iterate_(last_iterate), iterations_(iterations)
    {
    }

    std::complex<double> last_iterate() const { return last_iterate_; }
    int iterations() const { return iterations_; }

private:
    std::complex<double> last_iterate_;
    int iterations_;
};

/// Root found but it belongs to a different radial family than requested.
class RetargetingError : public Error
{
public:
    RetargetingError(const std::string &what, int requested_q, int found_q)
        : Error(what), requested_q_(requested_q), found_q_(found_q)
    {
    }

    int requested_q() const { return requested_q_; }
    int found_q() const { return found_q_; }

private:
    int requested_q_;
    int found_q_;
};

class SearchError : public Error
{
public:
    using Error::Error;
};

/// Quadrature did not reach the requested accuracy under refinement.
class AccuracyError : public Error
{
public:
    using Error::Error;
};

class MultimodeError : public Error
{
public:
    using Error::Error;
};

class NoModeError : public Error
{
public:
    using Error::Error;
};

class IntegrationError : public Error
{
public:
    using Error::Error;
};

/// Inputs that contradict each other, e.g. a coupling rate above the total rate.
class ConsistencyError : public Error
{
public:
    using Error::Error;
};

/// Stationary atomic population outside [0, 1/2].
class PhysicalityError : public Error
{
public:
    using Error::Error;
};

/// FDTD fields became non-finite.
class InstabilityError : public Error
{
public:
    InstabilityError(const std::string &what, long step) : Error(what), step_(step) {}
    long step() const { return step_; }

private:
    long step_;
};

/// File could not be opened or written.
class IoError : public Error
{
public:
    using Error::Error;
};

class NormalizationError : public Error
{
public:
    using Error::Error;
};

/// Solver failure inside an experiment run; the message names the experiment.
class ExperimentError : public Error
{
public:
    using Error::Error;
};

/// Invalid configuration or scenario. `key()` names the offending entry.
class ValidationError : public Error
{
public:
    ValidationError(const std::string &key, const std::string &message)
        : Error(key.empty() ? message : key + ": " + message), key_(key)
    {
    }

    const std::string &key() const { return key_; }

private:
    std::string key_;
};

} // namespace microdisk
