#include "eisenlab/specfun.hpp"

#include <algorithm>
#include <array>
#include <boost/math/special_functions/bernoulli.hpp>
#include <cmath>
#include <vector>

namespace eisenlab {

namespace {

// Stirling series for log Gamma and digamma is applied once Re z >= this.
constexpr double kShiftTarget = 12.0;
constexpr int kBernoulliTerms = 12;

const std::array<double, kBernoulliTerms + 1>& bernoulli_table() {
    static const auto table = [] {
        std::array<double, kBernoulliTerms + 1> b{};
        for (int k = 0; k <= kBernoulliTerms; ++k) b[k] = boost::math::bernoulli_b2n<double>(k);
        return b;
    }();
    return table;
}

bool is_nonpositive_integer(cplx z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

int shift_count(cplx z) { return std::max(0, static_cast<int>(std::ceil(kShiftTarget - z.real()))); }

// Second-order Taylor jet f + f' e + (f''/2) e^2 in the variable s.
struct Jet {
    cplx v, d, h;
    Jet operator+(const Jet& o) const { return {v + o.v, d + o.d, h + o.h}; }
    Jet operator*(const Jet& o) const { return {v * o.v, v * o.d + d * o.v, v * o.h + d * o.d + h * o.v}; }
    Jet operator*(cplx a) const { return {v * a, d * a, h * a}; }
    Jet operator/(const Jet& o) const {
        cplx q0 = v / o.v;
        cplx q1 = (d - q0 * o.d) / o.v;
        cplx q2 = (h - q0 * o.h - q1 * o.d) / o.v;
        return {q0, q1, q2};
    }
};

// n^{-s} as a jet in s.
Jet power_jet(double n, cplx s) {
    double L = std::log(n);
    cplx p = std::exp(-s * L);
    return {p, -L * p, 0.5 * L * L * p};
}

}  // namespace

void PrecisionPolicy::validate() const {
    if (!(rel_tol > 0.0 && rel_tol <= 1e-3)) throw ValidationError("rel_tol must lie in (0, 1e-3]");
    if (!(bessel_freq_oversample >= 4.0)) throw ValidationError("bessel_freq_oversample must be >= 4");
    if (!(exp_cutoff > 0.0)) throw ValidationError("exp_cutoff must be positive");
}

cplx log_gamma(cplx z) {
    if (is_nonpositive_integer(z)) throw PoleError("log_gamma: pole at nonpositive integer");
    const int n = shift_count(z);
    cplx shift_sum = 0.0;
    for (int k = 0; k < n; ++k) shift_sum += std::log(z + static_cast<double>(k));
    const cplx w = z + static_cast<double>(n);
    const auto& B = bernoulli_table();
    cplx series = (w - 0.5) * std::log(w) - w + 0.5 * std::log(kTwoPi);
    const cplx w2inv = 1.0 / (w * w);
    cplx wpow = 1.0 / w;
    for (int k = 1; k <= kBernoulliTerms; ++k) {
        series += B[k] / (2.0 * k * (2.0 * k - 1.0)) * wpow;
        wpow *= w2inv;
    }
    return series - shift_sum;
}

cplx digamma(cplx z) {
    if (is_nonpositive_integer(z)) throw PoleError("digamma: pole at nonpositive integer");
    const int n = shift_count(z);
    cplx shift_sum = 0.0;
    for (int k = 0; k < n; ++k) shift_sum += 1.0 / (z + static_cast<double>(k));
    const cplx w = z + static_cast<double>(n);
    const auto& B = bernoulli_table();
    cplx series = std::log(w) - 0.5 / w;
    const cplx w2inv = 1.0 / (w * w);
    cplx wpow = w2inv;
    for (int k = 1; k <= kBernoulliTerms; ++k) {
        series -= B[k] / (2.0 * k) * wpow;
        wpow *= w2inv;
    }
    return series - shift_sum;
}

cplx stirling_log_gamma(cplx z, double t, StirlingOrder order) {
    if (order.N < 0 || order.N > 8) throw DomainError("stirling_gamma: order must lie in [0, 8]");
    if (!(std::abs(t) > 2.0 * std::norm(z + 1.0))) throw DomainError("stirling_gamma: need |t| > 2|z+1|^2");
    if (t < 0) return std::conj(stirling_log_gamma(std::conj(z), -t, order));

    const cplx I(0.0, 1.0);
    const cplx leading = 0.5 * std::log(kTwoPi) + (z + I * t - 0.5) * std::log(t) - 0.5 * kPi * t - I * t +
                         I * (0.5 * kPi) * (z - 0.5);
    const int N = order.N;
    if (N == 0) return leading;

    // Exponent of the correction as a power series in e = 1/t, coefficients r[1..N].
    const int M = N + 2;
    std::vector<cplx> q(M + 1, 0.0);  // log(1 - i z e) = sum q_m e^m
    cplx izpow = 1.0;
    for (int m = 1; m <= M; ++m) {
        izpow *= I * z;
        q[m] = -izpow / static_cast<double>(m);
    }
    std::vector<cplx> r(N + 1, 0.0);
    for (int k = 2; k <= N + 1; ++k) r[k - 1] += I * q[k] + (z - 0.5) * q[k - 1];

    // Bernoulli terms B_2j / (2j(2j-1)) (e/i)^{2j-1} (1 - i z e)^{-(2j-1)}.
    const auto& B = bernoulli_table();
    for (int j = 1; 2 * j - 1 <= N; ++j) {
        const int m = 2 * j - 1;
        const cplx pref = B[j] / (2.0 * j * (2.0 * j - 1.0)) * std::pow(1.0 / I, m);
        cplx binom_term = 1.0;  // C(m + p - 1, p) (i z)^p
        for (int p = 0; m + p <= N; ++p) {
            if (p > 0) binom_term *= (I * z) * (static_cast<double>(m + p - 1) / p);
            r[m + p] += pref * binom_term;
        }
    }
    // exp of the series.
    std::vector<cplx> a(N + 1, 0.0);
    a[0] = 1.0;
    for (int k = 1; k <= N; ++k) {
        cplx acc = 0.0;
        for (int m = 1; m <= k; ++m) acc += static_cast<double>(m) * r[m] * a[k - m];
        a[k] = acc / static_cast<double>(k);
    }
    cplx corr = 0.0;
    double tp = 1.0;
    for (int k = 0; k <= N; ++k) {
        corr += a[k] * tp;
        tp /= t;
    }
    return leading + std::log(corr);
}

cplx stirling_gamma(cplx z, double t, StirlingOrder order) { return std::exp(stirling_log_gamma(z, t, order)); }

ZetaJet zeta_jet(cplx s) {
    if (s == cplx(1.0, 0.0)) throw PoleError("zeta: pole at s = 1");
    const int N = 2 * static_cast<int>(std::ceil(std::max(20.0, std::abs(s.imag()))));
    const Jet S{s, 1.0, 0.0};
    Jet sum{0.0, 0.0, 0.0};
    for (int n = 1; n < N; ++n) sum = sum + power_jet(n, s);
    const double Nd = N;
    const Jet Nms = power_jet(Nd, s);
    sum = sum + (Nms * Nd) / Jet{s - 1.0, 1.0, 0.0};
    sum = sum + Nms * 0.5;

    const auto& B = bernoulli_table();
    Jet rising = S;  // s (s+1) ... (s + 2k - 2)
    double fact = 2.0;  // (2k)!
    double Npow = 1.0 / Nd;  // N^{1-2k}
    for (int k = 1; k <= kBernoulliTerms; ++k) {
        Jet term = rising * Nms * (B[k] / fact * Npow);
        sum = sum + term;
        const double scale = std::abs(sum.v) + std::abs(sum.d) + std::abs(sum.h);
        if (k > 2 && std::abs(term.v) + std::abs(term.d) + std::abs(term.h) < 1e-18 * scale) break;
        rising = rising * Jet{s + (2.0 * k - 1.0), 1.0, 0.0} * Jet{s + 2.0 * k, 1.0, 0.0};
        fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
        Npow /= Nd * Nd;
    }
    return {sum.v, sum.d, 2.0 * sum.h};
}

cplx zeta(cplx s) { return zeta_jet(s).value; }

std::pair<cplx, cplx> zeta_log_derivs(cplx s) {
    const ZetaJet j = zeta_jet(s);
    if (j.value == cplx(0.0, 0.0)) throw PoleError("zeta_log_derivs: zeta vanishes");
    return {j.d1 / j.value, j.d2 / j.value};
}

LogPolar xi(cplx s) {
    if (s == cplx(0.0, 0.0) || s == cplx(1.0, 0.0)) throw PoleError("xi: pole at s = 0 or 1");
    if (is_nonpositive_integer(0.5 * s)) return xi(1.0 - s);
    const cplx l = -0.5 * s * std::log(kPi) + log_gamma(0.5 * s) + std::log(zeta(s));
    return LogPolar::from_log(l);
}

cplx xi_log_deriv(cplx s) {
    if (s == cplx(0.0, 0.0) || s == cplx(1.0, 0.0)) throw PoleError("xi_log_deriv: pole at s = 0 or 1");
    return -0.5 * std::log(kPi) + 0.5 * digamma(0.5 * s) + zeta_log_derivs(s).first;
}

cplx scattering_phi(cplx s) { return (xi(2.0 * s - 1.0) / xi(2.0 * s)).to_complex(); }

cplx scattering_phi_log_deriv(cplx s) { return 2.0 * xi_log_deriv(2.0 * s - 1.0) - 2.0 * xi_log_deriv(2.0 * s); }

Scattering scattering(double T) {
    if (!(T > 0.0)) throw DomainError("scattering: T must be positive");
    const cplx I(0.0, 1.0);
    Scattering out;
    out.c = (xi(1.0 - 2.0 * I * T) / xi(1.0 + 2.0 * I * T)).to_complex();
    out.phi = scattering_phi(0.5 + I * T);
    return out;
}

}  // namespace eisenlab
