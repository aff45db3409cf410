#pragma once

#include <vector>

#include "eisenlab/common.hpp"
#include "eisenlab/specfun.hpp"

namespace eisenlab {

struct Point {
    double x = 0.0;
    double y = 1.0;  // > 0
};

// Integer matrix of determinant one acting by fractional linear maps.
struct Mat2 {
    long long a = 1, b = 0, c = 0, d = 1;
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Point act(Point z) const;
};

struct Reduction {
    Point z;  // lies in the closed fundamental domain |x| <= 1/2, |z| >= 1
    Mat2 g;   // g acting on the input gives z
};

Reduction reduce(Point z);
// Membership in the fundamental domain with the given slack.
bool in_fundamental_domain(Point z, double slack = 1e-12);

struct SpectralSetup {
    double T = 10.0;
    double A = 2.0;
    double B = 2.0;
    double alpha = 0.009;
    double T_cap = 300.0;  // desk-scale ceiling
    PrecisionPolicy precision;

    // Throws ValidationError unless T in (0, T_cap], A > 1, B > 1, 0 < alpha < 1/100.
    void validate() const;
};

// Fourier data of E(., 1/2 + iT) on the horocycle at height y:
// E(x + iy) = constant + prefactor * 2 sum_{n>=1} coeff[n-1] cos(2 pi n x).
struct FourierRow {
    double y = 0.0;
    cplx constant;
    cplx prefactor;
    std::vector<double> coeff;  // tau(n,T) sqrt(y) e^{pi T/2} K_{iT}(2 pi n y)

    // Sum of the nonconstant modes at x.
    cplx oscillating(double x) const;
};

class EisensteinEvaluator {
public:
    explicit EisensteinEvaluator(const SpectralSetup& setup);

    const SpectralSetup& setup() const { return setup_; }
    cplx scattering_c() const { return c_; }
    LogPolar xi_norm() const { return xi_norm_; }
    // 2 e^{-pi T/2} / xi(1 + 2iT); O(1) at every height T.
    cplx prefactor() const { return prefactor_; }

    // ceil((T + 10 T^{1/3} + 40) / (2 pi y)).
    int n_max(double y) const;
    // Modes 1..n (n = 0 selects n_max(y)).
    FourierRow row(double y, int n = 0) const;

    cplx constant_term(double y) const;
    // Fourier expansion evaluated directly at any y > 0, without reduction.
    cplx eval_fourier(Point z, int n = 0) const;
    // E(z, 1/2 + iT); reduces z first.
    cplx eval_E(Point z) const;
    // Truncated series on the fundamental domain; throws DomainError off it.
    cplx eval_E_trunc(Point z) const;
    // 0 below A, 2 e(y) E_A(z) above.
    cplx eval_H_A(Point z) const;

private:
    SpectralSetup setup_;
    cplx c_;
    LogPolar xi_norm_;
    cplx prefactor_;
};

}  // namespace eisenlab
