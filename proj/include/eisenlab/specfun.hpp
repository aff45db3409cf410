#pragma once

#include <utility>

#include "eisenlab/common.hpp"

namespace eisenlab {

struct PrecisionPolicy {
    double rel_tol = 1e-10;
    double bessel_freq_oversample = 4.0;
    double exp_cutoff = 700.0;

    // Throws ValidationError unless rel_tol in (0, 1e-3] and oversample >= 4.
    void validate() const;
};

struct StirlingOrder {
    int N = 0;  // 0 <= N <= 8
};

// Principal branch of log Gamma(z).
cplx log_gamma(cplx z);
cplx digamma(cplx z);

// Gamma(z + i t) from the leading Stirling form times 1 + sum_{k<=N} c_k(z) / t^k.
// Requires |t| > 2 |z + 1|^2.
cplx stirling_gamma(cplx z, double t, StirlingOrder order);
// log of the same approximation, usable where Gamma itself under/overflows.
cplx stirling_log_gamma(cplx z, double t, StirlingOrder order);

cplx zeta(cplx s);
// (zeta'/zeta, zeta''/zeta).
std::pair<cplx, cplx> zeta_log_derivs(cplx s);
// zeta together with its first two derivatives.
struct ZetaJet {
    cplx value, d1, d2;
};
ZetaJet zeta_jet(cplx s);

// Completed zeta pi^{-s/2} Gamma(s/2) zeta(s) in log-polar form.
LogPolar xi(cplx s);
// xi'/xi(s).
cplx xi_log_deriv(cplx s);

struct Scattering {
    cplx c;    // xi(1-2iT) / xi(1+2iT)
    cplx phi;  // xi(2s-1)/xi(2s) at s = 1/2 + iT
};
Scattering scattering(double T);
// phi(s) = xi(2s-1)/xi(2s) for general complex s.
cplx scattering_phi(cplx s);
// phi'/phi(s).
cplx scattering_phi_log_deriv(cplx s);

// e^{pi T / 2} K_{iT}(y).
double bessel_k_scaled(double T, double y, const PrecisionPolicy& policy = {});
// Same quantity from the ascending series; used for y^2 <= 12 T and as a cross-check.
double bessel_k_scaled_series(double T, double y);
// Same quantity from the shifted cosine-transform quadrature.
double bessel_k_scaled_quadrature(double T, double y, const PrecisionPolicy& policy = {});
// K_nu(y) for real order.
double bessel_k_real(double nu, double y);

// Kuznetsov kernel for even test functions: i (J_{2it}(4 pi x) - J_{-2it}(4 pi x)) / sinh(pi t).
cplx kuznetsov_kernel(double x, double t, const PrecisionPolicy& policy = {});
// J_{2it}(w) / cosh(pi t) for real w > 0.
cplx bessel_j_imag_over_cosh(double w, double t, const PrecisionPolicy& policy = {});
// I(w, t) = int_0^inf exp(i w cosh u) cos(2 t u) du, by a deformed contour.
cplx oscillatory_cosh_integral(double w, double t, const PrecisionPolicy& policy = {});

}  // namespace eisenlab
