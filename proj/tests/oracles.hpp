#pragma once
// Independent reference implementations used only by tests.

#include <cmath>
#include <complex>
#include <random>

namespace oracle {

using lcplx = std::complex<long double>;

// log Gamma in long double: shift to Re z >= 40, Stirling with hard-coded Bernoulli numbers.
inline lcplx log_gamma(lcplx z) {
    static const long double B[] = {1.0L / 6, -1.0L / 30, 1.0L / 42, -1.0L / 30, 5.0L / 66, -691.0L / 2730, 7.0L / 6};
    lcplx shift = 0;
    while (z.real() < 40) {
        shift += std::log(z);
        z += 1.0L;
    }
    lcplx s = (z - 0.5L) * std::log(z) - z + 0.5L * std::log(2.0L * 3.14159265358979323846264338327950288L);
    lcplx zp = 1.0L / z;
    for (int k = 1; k <= 7; ++k) {
        s += B[k - 1] / (2.0L * k * (2 * k - 1)) * zp;
        zp /= z * z;
    }
    return s - shift;
}

// Euler-Maclaurin zeta in long double with a caller-chosen cutoff.
inline lcplx zeta_em(lcplx s, int N) {
    static const long double B[] = {1.0L / 6, -1.0L / 30, 1.0L / 42, -1.0L / 30, 5.0L / 66, -691.0L / 2730, 7.0L / 6,
                                    -3617.0L / 510};
    lcplx sum = 0;
    for (int n = 1; n < N; ++n) sum += std::exp(-s * std::log(static_cast<long double>(n)));
    const long double Nl = N;
    const lcplx Nms = std::exp(-s * std::log(Nl));
    sum += Nms * Nl / (s - 1.0L) + 0.5L * Nms;
    lcplx rising = s;
    long double fact = 2;
    long double Np = 1 / Nl;
    for (int k = 1; k <= 8; ++k) {
        sum += B[k - 1] / fact * rising * Nms * Np;
        rising *= (s + static_cast<long double>(2 * k - 1)) * (s + static_cast<long double>(2 * k));
        fact *= (2.0L * k + 1) * (2.0L * k + 2);
        Np /= Nl * Nl;
    }
    return sum;
}

inline double rel_err(std::complex<double> a, std::complex<double> b) { return std::abs(a - b) / std::abs(b); }

// Deterministic uniform sampler for property tests.
struct Sampler {
    std::mt19937_64 rng;
    explicit Sampler(unsigned long long seed) : rng(seed) {}
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }
};

}  // namespace oracle
