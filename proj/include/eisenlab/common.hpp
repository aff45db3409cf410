#pragma once

#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>

namespace eisenlab {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kEulerGamma = std::numbers::egamma;

// Argument outside the domain of an operation (y <= 0, |t| too small for Stirling, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Evaluation at a pole of Gamma, zeta or xi.
class PoleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A quadrature or series did not reach its tolerance; carries the best value found.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, cplx best, double estimate)
        : std::runtime_error(what), best_value(best), error_estimate(estimate) {}
    cplx best_value;
    double error_estimate;
};

// Input data rejected (malformed CSV, failed Hecke relation, bad parameters).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Complex number stored as log-modulus and phase, phase in (-pi, pi].
struct LogPolar {
    double log_mod = 0.0;
    double phase = 0.0;

    static LogPolar from_log(cplx l);
    cplx to_complex() const;
    LogPolar operator*(const LogPolar& o) const { return from_log({log_mod + o.log_mod, phase + o.phase}); }
    LogPolar operator/(const LogPolar& o) const { return from_log({log_mod - o.log_mod, phase - o.phase}); }
};

// Reduce an angle to (-pi, pi].
double wrap_phase(double phi);

// e(x) = exp(2 pi i x) with argument reduction mod 1.
cplx e_of(double x);

// Non-fatal diagnostics (out-of-bulk evaluation, duplicate CSV rows). Default sink writes to stderr.
using WarningSink = std::function<void(const std::string&)>;
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace eisenlab
