#include "eisenlab/common.hpp"

#include <cmath>
#include <iostream>
#include <mutex>

namespace eisenlab {

double wrap_phase(double phi) {
    double r = std::remainder(phi, kTwoPi);
    if (r <= -kPi) r += kTwoPi;
    return r;
}

LogPolar LogPolar::from_log(cplx l) { return {l.real(), wrap_phase(l.imag())}; }

cplx LogPolar::to_complex() const { return std::polar(std::exp(log_mod), phase); }

cplx e_of(double x) {
    double frac = x - std::nearbyint(x);
    return {std::cos(kTwoPi * frac), std::sin(kTwoPi * frac)};
}

namespace {
std::mutex g_warn_mutex;
WarningSink g_warn_sink;
}  // namespace

void set_warning_sink(WarningSink sink) {
    std::lock_guard<std::mutex> lock(g_warn_mutex);
    g_warn_sink = std::move(sink);
}

void warn(const std::string& message) {
    std::lock_guard<std::mutex> lock(g_warn_mutex);
    if (g_warn_sink)
        g_warn_sink(message);
    else
        std::cerr << "warning: " << message << '\n';
}

}  // namespace eisenlab
