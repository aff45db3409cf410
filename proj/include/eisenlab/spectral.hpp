#pragma once

#include <boost/rational.hpp>
#include <functional>
#include <istream>
#include <string>
#include <vector>

#include "eisenlab/common.hpp"
#include "eisenlab/maass_form.hpp"
#include "eisenlab/specfun.hpp"
#include "eisenlab/weights.hpp"

namespace eisenlab {

// ---- Maass form data -------------------------------------------------------------------------

struct HeckeAudit {
    double max_residual = 0.0;
    long long n = 0, m = 0;  // pair attaining max_residual
    long long pairs = 0;
};

// Every stored pair 2 <= n <= m with nm <= n_max(); pairs touching a missing entry are skipped.
HeckeAudit hecke_audit(const MaassForm& form);

struct IngestOptions {
    double reject_above = 1e-4;  // Hecke residual that rejects a form
    double warn_above = 1e-6;    // Hecke residual that only warns
};

// CSV with header t,parity,n,lambda; a row with n = 0 carries L(1, sym^2). Rows of one form share (t, parity).
// Duplicate (form, n) rows: the last one wins, with a warning. Throws ValidationError on malformed rows
// (with line number), lambda(1) != 1, or a Hecke residual above reject_above (with the offending pair).
// Forms come back sorted by (t, parity).
std::vector<MaassForm> ingest_forms(std::istream& in, const IngestOptions& opt = {});
std::vector<MaassForm> ingest_forms_file(const std::string& path, const IngestOptions& opt = {});

// ---- Test functions for the trace formula ------------------------------------------------------

struct TestFunction {
    enum class Kind { gaussian, custom };
    Kind kind = Kind::gaussian;
    // gaussian: exp(-(t/width)^2) when center = 0, else exp(-((t-center)/width)^2) + exp(-((t+center)/width)^2).
    double width = 8.0;
    double center = 0.0;
    // custom: an even function, entire or at least holomorphic in |Im t| < 1/4 + theta; cutoff beyond which |phi| < 1e-16.
    std::function<double(double)> custom;
    double custom_cutoff = 0.0;

    double operator()(double t) const;
    // |t| beyond which phi is below 1e-16 of its scale.
    double cutoff() const;
    // Parameter checks plus real-line spot checks of evenness and (1+|t|)^{-2} decay; ValidationError otherwise.
    void validate() const;
};

// ---- Approximate functional equation -----------------------------------------------------------

struct AfeResult {
    cplx value;   // L(1/2, u) L(1/2 - 2iT, u)
    cplx plus, minus;
    double tail = 0.0;  // weight size at the cut times the absolute partial sum
    double quadrature_error = 0.0;
    long long x_max = 0;  // k^2 n <= x_max
};

// Sum over k^2 n <= n_max() of lambda(n) tau(n,T) / (n^{1/2 -+ iT} k^{1 -+ 2iT}) V_{+-}(k^2 n, t).
// Odd forms use the odd-parity weights. contour.height = 0 selects height 10 (e^{w^2} is below e^{-90} there).
// Throws DomainError when T^{2.05} > n_max() or an eigenvalue below the cut is missing.
AfeResult afe_pair(const MaassForm& form, double T, const WeightContour& contour = {});

// ---- Triple product ----------------------------------------------------------------------------

enum class GammaPath { exact, stirling };

struct PairingResult {
    cplx value;              // <E^2(., 1/2 + iT), u_j>; zero for odd forms
    LogPolar log_value;
    double rho1 = 0.0;       // rho_j(1) = sqrt(2 cosh(pi t) / L(1, sym^2))
    int stirling_factors = 0;      // gamma factors replaced on the stirling path
    double stirling_error = 0.0;   // |log(order 4) - log(order 0)| summed over replaced factors
};

// (rho_j(1)/2) Lambda(1/2, u) Lambda(1/2 + 2iT, u) / xi(1 + 2iT)^2 with L(1/2)L(1/2+2iT) = conj(afe_pair).
// The stirling path replaces Gamma(z + i y) by its leading Stirling form wherever |y| > 2|z+1|^2.
// Throws ValidationError when sym2_L1 is absent (even forms only).
PairingResult rankin_selberg_pairing(const MaassForm& form, double T, GammaPath path = GammaPath::exact,
                                     const WeightContour& contour = {});

// ---- Kuznetsov ---------------------------------------------------------------------------------

struct KloostermanPartial {
    int c_max = 0;
    double sum = 0.0;           // sum_{c <= c_max} S(n,m;c)/c * (transform at sqrt(nm)/c)
    double tail_estimate = 0.0; // Weil bound with |transform(x)| <= K x
};

struct KuznetsovReport {
    long long n = 0, m = 0;
    int c_max = 0;
    double discrete = 0.0;     // sum_j lambda_j(n) lambda_j(m) phi(t_j) / L(1, sym^2 u_j)
    double continuous = 0.0;   // int tau(n,t) tau(m,-t) / |zeta(1+2it)|^2 phi(t) dt / 2pi
    double spectral = 0.0;
    double delta = 0.0;        // delta_{nm} int phi d*t / 2 pi^2
    double delta_resolution_gap = 0.0;  // |delta at two panel widths|
    std::vector<KloostermanPartial> partials;  // c_max/4, c_max/2, c_max
    double kloosterman = 0.0;
    double geometric = 0.0;
    double K_slope = 0.0;      // max |transform(x)| / x over c in [c_max/4, c_max]
    double quadrature_error = 0.0;
    double basis_tail = 0.0;   // d(n)d(m) int_{t_cover}^inf |phi| t dt / pi^2, Weyl-law density of the missing forms
    double t_cover = 0.0;
    double closure = 0.0;      // |spectral - geometric|
    double closure_bound = 0.0;  // basis_tail + c tail + quadrature error
    double relative = 0.0;       // closure / |geometric|
    std::string attribution;     // "basis truncation" or "c truncation"
};

// Forms must carry sym2_L1 and be complete up to t_cover = the largest t supplied; anything above is estimated.
KuznetsovReport kuznetsov_two_sides(long long n, long long m, const TestFunction& phi, const std::vector<MaassForm>& forms,
                                    int c_max);

// ---- J-Bessel transform ------------------------------------------------------------------------

struct BesselTransformCheck {
    cplx direct;      // int J_{2it}(2 pi x) / cosh(pi t) Z(t/T) t dt over the real line
    cplx main;        // (-i sqrt2/pi) (T^2/sqrt x) Re((1+i) e(x) int_0^inf u Z(u) e(-u^2 T^2 / (2 pi^2 x)) du)
    double difference = 0.0;
    double envelope = 0.0;   // x / T^{3 - 24 alpha}
    double fitted_C = 0.0;   // difference / envelope
    double scale = 0.0;      // 2 T^2 int_0^inf u |Z(u)| du, a trivial bound for |direct|
    double quadrature_error = 0.0;
};

// Z = scale * window_Z(., T, alpha). Direct side by Gauss-Legendre over the support, at two panel counts.
BesselTransformCheck bessel_transform_check(double x, double T, double alpha, double z_scale = 1.0);

// ---- Diagonal terms ----------------------------------------------------------------------------

struct DiagonalTerms {
    cplx D_pp;     // hhat(0) (12/pi^2) zeta(1+2iT) zeta(1-2iT)^2 log^2 T
    cplx D_mm;     // hhat(0) pi^{-4iT} e^{-2iT} T^{2iT} (12/pi^2) zeta(1+2iT)^2 zeta(1-2iT) log^2 T
    cplx total;    // pi / (zeta(1-2iT)^2 zeta(1+2iT)) (D_pp + c(T) pi^{2iT} D_mm)
    cplx bracket;  // 1 + Gamma(1/2-iT)/Gamma(1/2+iT) e^{-2iT} T^{2iT}
    cplx bracket_stirling;  // the same with the gamma ratio from the order-4 Stirling series
    double prediction = 0.0;  // hhat(0) (24/pi) log^2 T
    double deviation = 0.0;   // |total / prediction - 1|
};

// Requires T >= 10.
DiagonalTerms diagonal_main_terms(double T, const Bump& bump);

// int_0^{2T} dt / sqrt(4T^2 - t^2) by tanh-sinh quadrature; exactly pi/2.
double arcsine_mass(double T);

// ---- Constant bookkeeping ----------------------------------------------------------------------

using Rational = boost::rational<long long>;

struct LedgerRow {
    std::string piece;
    std::string asymptotic;  // as stated, in units of (1/pi) log^2 T
    Rational coefficient;    // signed multiple of (1/pi) log^2 T in the fourth moment
    double value = 0.0;      // hhat(0) coefficient/pi log^2 T
};

struct PredictionLedger {
    std::vector<LedgerRow> rows;
    Rational total;
    bool combines_to_36 = false;
    double hhat0 = 0.0;
    double prediction = 0.0;  // hhat(0) (36/pi) log^2 T
};

// cross_coefficient is the coefficient of the cross term Xi (24); anything else breaks the identity.
PredictionLedger prediction_ledger(double T, const Bump& bump, Rational cross_coefficient = Rational(24));

}  // namespace eisenlab
