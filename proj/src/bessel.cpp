#include <algorithm>
#include <cmath>

#include "eisenlab/specfun.hpp"

namespace eisenlab {

namespace {

// Relative size below which contour tails are dropped.
constexpr double kTailLog = 42.0;
// Allowed log-growth of the integrand above the size of the result along a deformed contour.
constexpr double kLossLog = 4.0;

// log(sinh(a)) for a > 0 without overflow.
double log_sinh(double a) { return a + std::log1p(-std::exp(-2.0 * a)) - std::log(2.0); }
double log_cosh(double a) { return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0); }

// Ascending series sum_k sign^k (w/2)^{2k+nu} / (k! Gamma(k+1+nu)) times exp(-log_scale), nu = i*nu_im.
cplx bessel_series(double w, double nu_im, double sign, double log_scale) {
    const cplx nu(0.0, nu_im);
    cplx term = std::exp(nu * std::log(0.5 * w) - log_gamma(1.0 + nu) - log_scale);
    cplx sum = term;
    const double q = 0.25 * w * w;
    double peak = std::abs(term);
    for (int k = 1; k < 100000; ++k) {
        term *= sign * q / (static_cast<double>(k) * (static_cast<double>(k) + nu));
        sum += term;
        const double a = std::abs(term);
        peak = std::max(peak, a);
        if (a < 1e-18 * peak && static_cast<double>(k) * k > q) break;
    }
    return sum;
}

}  // namespace

double bessel_k_scaled_series(double T, double y) {
    if (!(y > 0.0)) throw DomainError("bessel_k_scaled: y must be positive");
    T = std::abs(T);
    if (!(T > 0.0)) throw DomainError("bessel_k_scaled_series: requires T > 0");
    const cplx s = bessel_series(y, T, 1.0, 0.5 * kPi * T);
    return -2.0 * kPi / (-std::expm1(-2.0 * kPi * T)) * s.imag();
}

double bessel_k_scaled_quadrature(double T, double y, const PrecisionPolicy& policy) {
    if (!(y > 0.0)) throw DomainError("bessel_k_scaled: y must be positive");
    T = std::abs(T);
    // Path u + i theta. Log-modulus of the scaled integrand at u = 0 is g(theta).
    auto g = [&](double th) { return T * (0.5 * kPi - th) - y * std::cos(th); };
    const double th_star = (T == 0.0) ? 0.0 : (y > T ? std::asin(T / y) : 0.5 * kPi);
    const double g_star = g(th_star);
    double theta = 0.0;
    if (g(0.0) > g_star + kLossLog) {
        double lo = 0.0, hi = th_star;  // g(lo) too large, g(hi) acceptable
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (g(mid) > g_star + kLossLog ? lo : hi) = mid;
        }
        theta = hi;
    }
    if (theta >= 0.5 * kPi) theta = 0.5 * kPi - 1e-3;
    const double ct = std::cos(theta), st = std::sin(theta);
    if (g_star < -policy.exp_cutoff) return 0.0;
    const double excess = g(theta) - g_star + kTailLog;
    const double U = std::acosh(1.0 + excess / (y * ct));
    const double F = T + y * std::cosh(U);
    const double h = kTwoPi / (F * policy.bessel_freq_oversample);
    const int M = static_cast<int>(std::ceil(U / h));
    const double base = 0.5 * kPi * T - T * theta;
    double acc = 0.0;
    for (int j = -M; j <= M; ++j) {
        const double u = j * h;
        const double re = base - y * std::cosh(u) * ct;
        const double im = T * u - y * std::sinh(u) * st;
        acc += std::exp(re) * std::cos(im);
    }
    return 0.5 * acc * h;
}

double bessel_k_scaled(double T, double y, const PrecisionPolicy& policy) {
    if (!(y > 0.0)) throw DomainError("bessel_k_scaled: y must be positive");
    T = std::abs(T);
    if (T >= 0.5 && y * y <= 12.0 * T) return bessel_k_scaled_series(T, y);
    return bessel_k_scaled_quadrature(T, y, policy);
}

double bessel_k_real(double nu, double y) {
    if (!(y > 0.0)) throw DomainError("bessel_k_real: y must be positive");
    return std::cyl_bessel_k(std::abs(nu), y);
}

cplx oscillatory_cosh_integral(double w, double t, const PrecisionPolicy& policy) {
    if (!(w > 0.0)) throw DomainError("oscillatory_cosh_integral: w must be positive");
    const double at = std::abs(t);
    // Path z = u + i theta tanh(u); Re exponent = -w sinh(u) sin(phi) - 2|t| phi, phi = theta tanh(u).
    const double theta = at > 0.0 ? std::min(0.7, 3.0 / at) : 0.7;
    auto decay = [&](double u) {
        const double phi = theta * std::tanh(u);
        return w * std::sinh(u) * std::sin(phi) + 2.0 * at * phi;
    };
    // Largest log-modulus, attained on u < 0.
    double loss = 0.0;
    for (double u = 0.0; u < 60.0; u += 0.01) {
        const double v = -decay(-u);
        loss = std::max(loss, v);
        if (u > 1.0 && w * std::sinh(u) * std::sin(theta * std::tanh(u)) > 2.0 * (2.0 * at * theta + kTailLog)) break;
    }
    const double need = loss + kTailLog;
    double U = 0.5;
    while (decay(-U) < need || decay(U) < need) U *= 1.25;
    const double F = (w * std::cosh(U) + 2.0 * at) * (1.0 + theta);
    const double h = kTwoPi / (F * policy.bessel_freq_oversample);
    const int M = static_cast<int>(std::ceil(U / h));
    const cplx I(0.0, 1.0);
    cplx acc = 0.0;
    for (int j = -M; j <= M; ++j) {
        const double u = j * h;
        const double th = std::tanh(u);
        const cplx z(u, theta * th);
        const cplx dz(1.0, theta * (1.0 - th * th));
        acc += std::exp(I * w * std::cosh(z) + 2.0 * I * at * z) * dz;
    }
    return 0.5 * acc * h;
}

cplx kuznetsov_kernel(double x, double t, const PrecisionPolicy& policy) {
    if (!(x > 0.0)) throw DomainError("kuznetsov_kernel: x must be positive");
    if (t == 0.0) throw DomainError("kuznetsov_kernel: t must be nonzero");
    const double w = 4.0 * kPi * x;
    const double at = std::abs(t);
    if (std::min(w, w * w / (8.0 * at)) <= 6.0) {
        const double ls = log_sinh(kPi * at);
        const cplx jp = bessel_series(w, 2.0 * at, -1.0, ls);
        const cplx jm = bessel_series(w, -2.0 * at, -1.0, ls);
        return cplx(0.0, 1.0) * (jp - jm);
    }
    return cplx(4.0 / kPi * oscillatory_cosh_integral(w, at, policy).real(), 0.0);
}

cplx bessel_j_imag_over_cosh(double w, double t, const PrecisionPolicy& policy) {
    if (!(w > 0.0)) throw DomainError("bessel_j_imag_over_cosh: w must be positive");
    const double at = std::abs(t);
    if (std::min(w, w * w / (8.0 * std::max(at, 1e-300))) <= 6.0) {
        return bessel_series(w, 2.0 * t, -1.0, log_cosh(kPi * at));
    }
    const cplx I = oscillatory_cosh_integral(w, at, policy);
    return 2.0 / kPi * cplx(I.imag(), -std::tanh(kPi * t) * I.real());
}

}  // namespace eisenlab
