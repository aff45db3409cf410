#pragma once

#include <functional>
#include <vector>

#include "eisenlab/common.hpp"
#include "eisenlab/eisenstein.hpp"
#include "eisenlab/weights.hpp"

namespace eisenlab {

// Integrands arrive one horocycle at a time. eval fills out[0..size()) with int f_k(x + iy) dx over
// |x| <= 1/2 when xlo == 0, and over the two arcs xlo <= |x| <= 1/2 otherwise (rows below y = 1).
// fine selects the doubled x-order used by the order-32 y-nodes.
class RowSource {
public:
    virtual ~RowSource() = default;
    virtual int size() const = 0;
    virtual void eval(double y, double xlo, bool fine, double* out) const = 0;
    // x-nodes per unit length used at height y (coarse rule).
    virtual int x_nodes_per_unit(double y) const = 0;
};

struct IntegrateOptions {
    double log_width = 0.25;          // top panels: width in log y
    std::vector<double> breakpoints;  // extra panel edges, y > 1
    int refine = 1;                   // divides panel widths; doubles x sub-panels in generic rows
    double x_frequency = 8.0;         // generic f: oscillations per unit x the x-panels must resolve
    double tail_constant = 0.0;       // integrate_F adds tail_constant / y_max for y > y_max
    int max_refinements = 3;          // integrate_F doubles refine at most this many times

    // Throws ValidationError on non-positive widths or refine < 1.
    void validate() const;
};

// A horizontal strip of F. Bottom panels live in v = sqrt(1 - y^2) in [0, 1/2], x in [v, 1/2] and its mirror.
struct Panel {
    double y_lo = 0.0, y_hi = 0.0;
    bool bottom = false;
    int order_y = 32;
    int x_nodes_per_unit = 0;
};

struct QuadratureGrid {
    double y_max = 0.0;
    std::vector<Panel> panels;
    double est_error = 0.0;
};

struct Integral {
    double value = 0.0;
    double est_error = 0.0;
};

// Per-panel results of one pass; a panel's value is its order-32 sum, its error |I32 - I16| plus a roundoff floor.
struct RowIntegration {
    QuadratureGrid grid;
    std::vector<std::vector<double>> value, error;  // [panel][k]

    // Sum of quantity k over the panels accepted by keep, in panel order.
    Integral sum(int k, const std::function<bool(const Panel&)>& keep) const;
    Integral sum(int k) const;
};

// Rows are evaluated in parallel; panel sums are reduced serially so results do not depend on thread count.
RowIntegration integrate_rows(const RowSource& rows, double y_max, const IntegrateOptions& opt = {});

using PointFunction = std::function<double(Point)>;

struct FIntegral {
    double value = 0.0;
    double est_error = 0.0;
    QuadratureGrid grid;
};

// int_{F, y <= y_max} f dmu, refined until est_error <= tol * |value|; ConvergenceError otherwise.
FIntegral integrate_F(const PointFunction& f, double y_max, double tol, const IntegrateOptions& opt = {});

// E(z, s) for real s in (1, 4]: y^s + phi(s) y^{1-s} + (2/xi(2s)) 2 sum n^{s-1/2} sigma_{1-2s}(n) sqrt(y) K_{s-1/2}(2 pi n y) cos(2 pi n x).
class RealEisenstein {
public:
    explicit RealEisenstein(double s);
    double s() const { return s_; }
    double phi() const { return phi_; }
    // ceil(45 / (2 pi y)) + 2 modes; the coefficients fall like e^{-2 pi n y}.
    int n_max(double y) const;
    FourierRow row(double y) const;
    double constant_term(double y) const;
    double eval(Point z) const;

private:
    double s_, phi_, prefactor_;
};

// (A^{s1+s2-1} - phi(s1)phi(s2)A^{1-s1-s2})/(s1+s2-1) + (phi(s2)A^{s1-s2} - phi(s1)A^{s2-s1})/(s1-s2).
// DomainError when s1 = s2 or s1 + s2 = 1 (use maass_selberg_limit there).
cplx maass_selberg(cplx s1, cplx s2, double A);
// The s1 -> s2 = 1/2 + iT limit: phi (2 log A - phi'/phi) + (A^{2iT} - phi^2 A^{-2iT}) / (2iT).
cplx maass_selberg_limit(double T, double A);
// int E_A(., s1) E_A(., s2) dmu by quadrature, real s in (1, 4].
FIntegral maass_selberg_quadrature(double s1, double s2, double A, double tol = 1e-10);

struct MomentReport {
    double T = 0.0, A = 0.0;
    int p = 4;
    double value = 0.0;
    double est_error = 0.0;
    double prediction = 0.0;
    double ratio = 0.0;  // value / prediction when prediction != 0
};

// Everything one pass of rows gives at a single A.
struct MomentSet {
    MomentReport fourth;          // ||E_A||_4^4 against (36/pi) log^2 T
    MomentReport second;          // |int E_A^2| against 2 log T
    cplx second_integral;         // int E_A^2 dmu
    double second_error = 0.0;
    cplx second_closed_form;      // maass_selberg_limit(T, A)
    double l2_norm = 0.0;         // int |E_A|^2
    double HA_norm = 0.0;         // <H_A, H_A>
    double constant_projection = 0.0;             // (3/pi) |int E_A^2|^2
    double constant_projection_prediction = 0.0;  // (12/pi) log^2 T
    double y_max = 0.0;
    QuadratureGrid grid;
};

// A + (T + 20 T^{1/3}) / (2 pi) + 5.
double moment_y_max(double T, double A);

// One set of rows shared by every A in the list. Refines until the fourth and second moments meet tol.
std::vector<MomentSet> moment_sweep(const SpectralSetup& setup, const std::vector<double>& A_list, double tol = 1e-8,
                                    const IntegrateOptions& opt = {});
MomentSet moment_set(const SpectralSetup& setup, double tol = 1e-8, const IntegrateOptions& opt = {});
MomentReport fourth_moment(const SpectralSetup& setup, double tol = 1e-8);

struct SmoothedMoment {
    double value = 0.0;      // int h(A) ||E_A||_4^4 dA
    double est_error = 0.0;
    double hhat0 = 0.0;
    double prediction = 0.0;  // hhat(0) (36/pi) log^2 T
    double at_B = 0.0;        // hhat(0) ||E_B||_4^4
    double A_sensitivity = 0.0;  // max over nodes of | ||E_{A_k}||^4 - ||E_B||^4 |
    // hhat(0) int |E_B|^4 split at the shell Omega = [B - delta, B + delta].
    double I1 = 0.0, I2 = 0.0, I3 = 0.0;
    double direct = 0.0;      // hhat(0) ||E_B||_4^4 summed over all panels at once
    double shell = 0.0;       // sum_k w_k int_Omega |E_{A_k}|^4
    // value - [(sum w)(I1 + I3)/hhat(0) + shell]; zero up to rounding because E_{A_k} = E_B off the shell.
    double reassembly_residual = 0.0;
    // bound for |I2 - shell| from |E_B - E_A| <= 2 sqrt(y) on the shell, by binomial expansion.
    double shell_bound = 0.0;
    int nodes = 0;
};

// Requires B - delta >= 1 so that the shell stays in the upper strip.
SmoothedMoment smoothed_fourth_moment(const SpectralSetup& setup, const Bump& bump, double tol = 1e-8);

struct TruncationDifference {
    int samples = 0;
    int nonzero = 0;          // samples where E_B - E_A differs from zero
    double max_ratio = 0.0;   // max |E_B - E_A| / sqrt(y)
};
// Samples E_B - E_A on a grid of x in [-1/2, 1/2] and y in [1, max(A,B) + 1].
TruncationDifference truncation_difference(const SpectralSetup& setup, double A, double B, int samples_per_axis = 24);

}  // namespace eisenlab
