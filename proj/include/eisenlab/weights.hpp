#pragma once

#include <functional>
#include <vector>

#include "eisenlab/common.hpp"
#include "eisenlab/maass_form.hpp"
#include "eisenlab/specfun.hpp"

namespace eisenlab {

// Smooth bump h(A) = scale * exp(-1/(1-u^2)), u = (A-B)/delta, delta = T^{-alpha/2}; integral exactly delta.
struct Bump {
    double B = 2.0;
    double alpha = 0.009;
    double T = 10.0;
    double delta = 1.0;
    double scale = 1.0;

    // Throws ValidationError unless B > 1, T > 0, 0 < alpha < 1/100.
    static Bump make(double B, double alpha, double T);
    double lo() const { return B - delta; }
    double hi() const { return B + delta; }
    // hat h(0) = int h, equal to delta by construction.
    double hhat0() const { return delta; }
};

// int_{-1}^{1} exp(-1/(1-u^2)) du.
double mollifier_mass();

double bump_h(double A, const Bump& bump);
// k-th derivative of h, 0 <= k <= 4.
double bump_h_derivative(double A, const Bump& bump, int k);
// h~(s) = int h(A) (pi A)^{s-1} dA. Trapezoid in tau with u = tanh(tau), step halved until converged.
cplx bump_transform(cplx s, const Bump& bump);
// Nodes A_k and weights w_k (h already folded in) with sum w_k f(A_k) ~ int h(A) f(A) dA.
// Trapezoid in tau with step 2^{-level}.
void bump_nodes(const Bump& bump, std::vector<double>& A, std::vector<double>& w, int level = 2);

// W(t) = [1 - exp(-(t/(2T)^{1-alpha/2})^{2M})] [1 - exp(-((4T^2-t^2)/(4T^{2-alpha/2}))^{2M})],
// M = ceil(1000/alpha), evaluated in log space. Zero for |t| >= 2T.
double window_W(double t, double T, double alpha);
// Even bump in u = t/T supported on T^{-2 alpha} < |u| < T^{2 alpha}, peak value 1.
double window_Z(double u, double T, double alpha);

struct WeightContour {
    double sigma = 1.0;
    double height = 0.0;  // 0 selects the default cap of each weight
    double step = 0.0;    // panel width; 0 selects 0.25

    // Throws ValidationError unless sigma > 0, height >= 0, step >= 0.
    void validate() const;
};

bool in_bulk(double t, double T, double alpha);

// prod_+- G((1/2 +- it)/2) G((1/2 - 2iT +- it)/2) / (G(1/2-iT)^2 G(1/2-it)).
cplx log_weight_Hcal(double t, double T);
// Warns (does not throw) when t is outside the bulk for the given alpha.
cplx weight_Hcal(double t, double T, double alpha = 0.009);

enum class Sign { plus, minus };

// Gamma part of H_{+-}(s,t), without h~(1-s), in log form:
// prod_+- G((s+1/2 +- 2iT +- it)/2) G((s+1/2 +- it)/2) / (G(s+1/2 +- iT) G(1/2+iT) G(1/2+it)).
cplx log_weight_Hcal_pm_gamma(cplx s, double t, double T, Sign sign);
cplx weight_Hcal_pm(cplx s, double t, double T, const Bump& bump, Sign sign);

// log G_{+-,a}(w,t); a = 1/2 for even forms, 3/2 for odd.
cplx log_G_afe(cplx w, double t, double T, Sign sign, Parity parity);

struct ContourIntegral {
    cplx value;
    double error = 0.0;  // |order-32 - order-16| over the same panels
    double tail = 0.0;   // size of what the height cap leaves out
    double height = 0.0;
};

// Discretized (1/2 pi i) int_{(sigma)} F(w) X^{-w} dw: nodes w_k and coefficients c_k, at two GL orders.
// Evaluating at many X costs one complex power per node.
class ContourKernel {
public:
    ContourKernel() = default;
    // log_f(w) = log F(w); nodes are evaluated in parallel. height is the half-length of the truncated line.
    ContourKernel(const std::function<cplx(cplx)>& log_f, double sigma, double height, double step);

    ContourIntegral eval(double X) const;
    double height() const { return height_; }
    // max |F| at the two cut points relative to max |F| on the line.
    double edge_ratio() const { return edge_ratio_; }

private:
    std::vector<cplx> w16_, c16_, w32_, c32_;
    double height_ = 0.0, edge_ratio_ = 0.0, edge_log_ = 0.0;
};

// V_{+-}(x,t) = (1/2 pi i) int_{(sigma)} e^{w^2} x^{-w} G_{+-,a}(w,t) dw/w; height cap max(30, 10 sqrt(log x)).
ContourIntegral weight_V_pm(double x, double t, double T, Sign sign, Parity parity, const WeightContour& c = {});
// Kernel for V_{+-}(., t) valid for x up to x_max.
ContourKernel kernel_V_pm(double t, double T, Sign sign, Parity parity, double x_max, const WeightContour& c = {});
// Leading Stirling form V_{+-}(t) (1/2 pi i) int e^{w^2 -+ i pi w/2} (|t|(4T^2-t^2)^{1/2}/(4 pi^2 x))^w dw/w.
ContourIntegral weight_V_leading(double x, double t, double T, Sign sign, const WeightContour& c = {});

// Vcal_{+-}(x,t) = (1/2 pi i) int_{(sigma)} H_{+-}(s,t) x^{-s} ds/s.
// height == 0: the untruncated integral, computed as int h(A) U(pi A x) dA where U is the gamma-part contour
// integral (absolutely convergent, cut where the gamma part has decayed by e^{-90}).
// height > 0: the line truncated at |Im s| = height with h~(1-s) inside; tail = |untruncated - truncated|.
ContourIntegral weight_Vcal_pm(double x, double t, double T, const Bump& bump, Sign sign, const WeightContour& c = {});

struct LeadingTerms {
    cplx HH_plus;       // 8 pi h~(1-s) / q * (q/(4T))^s, q = |t| (4T^2-t^2)^{1/2}
    cplx HH_minus;      // HH_plus * (T/(pi^2 e))^{2iT} e^{-i pi s}, literal form
    cplx Vminus_phase;  // (2 pi e)^{-4iT} e^{-i pi/2} |2T+t|^{i(2T+t)} |2T-t|^{i(2T-t)}
};
LeadingTerms leading_terms(cplx s, double t, double T, const Bump& bump);
// G_{-,1/2}(0,t): the exact unimodular factor that Vminus_phase approximates.
cplx Vminus_exact(double t, double T);

// g(x) = int_x^inf y^{1/2+iT} K_{iT}(y) K_{it}(y) dy/y.
cplx mellin_g(double x, double t, double T);
// G(s) = 2^{s-5/2+iT}/s prod_+- G((s+1/2+2iT+-it)/2) G((s+1/2+-it)/2) / G(s+1/2+iT).
cplx mellin_G(cplx s, double t, double T);
struct MellinPair {
    cplx g_numeric;
    cplx G_closed;
};
MellinPair g_mellin_pair(double x, cplx s, double t, double T);
// int_0^inf x^s K_{i mu}(x) K_{i nu}(x) dx/x = 2^{s-3}/Gamma(s) prod_{+-,+-} Gamma((s +- i mu +- i nu)/2).
cplx mellin_barnes_KK(cplx s, double mu_im, double nu_im);
// The same integral by quadrature in log x (real s > 0).
cplx mellin_barnes_KK_quadrature(double s, double mu_im, double nu_im);
// int_0^inf g(x) x^{s-1} dx with g itself evaluated by an inner quadrature at every outer node.
cplx mellin_g_transform_quadrature(double s, double t, double T);

}  // namespace eisenlab
