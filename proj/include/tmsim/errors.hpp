#ifndef TMSIM_ERRORS_HPP
#define TMSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tmsim {

/// Base class for runtime numerical failures (as opposed to bad arguments,
/// which throw std::invalid_argument).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// A covariance (sub-)matrix is too ill-conditioned to invert reliably.
class DegeneracyError : public NumericalError {
public:
    explicit DegeneracyError(const std::string& what) : NumericalError(what) {}
};

/// A dense computation would exceed the supported problem size.
class ResourceLimitError : public std::invalid_argument {
public:
    explicit ResourceLimitError(const std::string& what) : std::invalid_argument(what) {}
};

/// Nonlinear least squares did not converge.
class FitFailure : public NumericalError {
public:
    FitFailure(const std::string& what, double residual_norm, int iterations)
        : NumericalError(what), residual_norm(residual_norm), iterations(iterations) {}
    double residual_norm;
    int iterations;
};

/// Data unusable for the requested analysis (e.g. flat scan).
class InvalidDataError : public std::invalid_argument {
public:
    explicit InvalidDataError(const std::string& what) : std::invalid_argument(what) {}
};

/// Ratio of sideband populations is undefined (zero denominator).
class UndefinedRatioError : public NumericalError {
public:
    explicit UndefinedRatioError(const std::string& what) : NumericalError(what) {}
};

/// Scenario configuration is missing, malformed or inconsistent.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace tmsim

#endif
