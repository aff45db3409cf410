#include "eisenlab/weights.hpp"

#include <algorithm>
#include <cmath>

#include "eisenlab/quadrature.hpp"

namespace eisenlab {

namespace {

constexpr double kTauMax = 4.0;  // e^{-cosh^2 4} underflows: the tanh map covers the support completely
const double kLogPi = std::log(kPi);

cplx log_gamma_R(cplx z) { return -0.5 * z * kLogPi + log_gamma(0.5 * z); }

// Sum of complex terms with the fixed pairwise tree on each component.
cplx pairwise_sum_c(const std::vector<cplx>& v) {
    std::vector<double> re(v.size()), im(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        re[i] = v[i].real();
        im[i] = v[i].imag();
    }
    return {pairwise_sum(re.data(), re.size()), pairwise_sum(im.data(), im.size())};
}

// int_a^b f by `order`-point GL on panels of width <= width; nodes evaluated in parallel.
template <class F>
cplx panel_integral(F f, double a, double b, double width, int order) {
    if (!(b > a)) return 0.0;
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
    std::vector<double> x, w;
    for (int p = 0; p < panels; ++p)
        append_gauss(order, a + (b - a) * p / panels, a + (b - a) * (p + 1) / panels, x, w);
    std::vector<cplx> terms(x.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t i = 0; i < x.size(); ++i) terms[i] = w[i] * f(x[i]);
    return pairwise_sum_c(terms);
}

// K_{ia}(y) K_{ib}(y) for real a, b.
double kk_product(double y, double a, double b) {
    auto k = [y](double nu) {
        nu = std::abs(nu);
        if (nu == 0.0) return bessel_k_real(0.0, y);
        return bessel_k_scaled(nu, y) * std::exp(-0.5 * kPi * nu);
    };
    return k(a) * k(b);
}

// log y of the point beyond which y^{1/2} K K < 1e-20 of its size near y = x.
double upper_log(double x) { return std::log(std::max(x, 1.0) + 26.0); }

cplx g_integrand(double v, double t, double T) {
    const double y = std::exp(v);
    return std::exp(cplx(0.5 * v, T * v)) * kk_product(y, T, t);
}

}  // namespace

Bump Bump::make(double B, double alpha, double T) {
    if (!(B > 1.0)) throw ValidationError("Bump: B must exceed 1");
    if (!(T > 0.0)) throw ValidationError("Bump: T must be positive");
    if (!(alpha > 0.0 && alpha < 0.01)) throw ValidationError("Bump: alpha must lie in (0, 1/100)");
    Bump b;
    b.B = B;
    b.alpha = alpha;
    b.T = T;
    b.delta = std::pow(T, -0.5 * alpha);
    b.scale = 1.0 / mollifier_mass();
    return b;
}

double mollifier_mass() {
    // Same tanh-coordinate trapezoid as bump_transform, so that h~(1) reproduces delta to rounding.
    static const double mass = [] {
        const double h = 1.0 / 64.0;
        const int n = static_cast<int>(kTauMax / h);
        double sum = 0.0;
        for (int j = -n; j <= n; ++j) {
            const double c = std::cosh(j * h);
            sum += std::exp(-c * c) / (c * c);
        }
        return sum * h;
    }();
    return mass;
}

double bump_h(double A, const Bump& bump) { return bump_h_derivative(A, bump, 0); }

double bump_h_derivative(double A, const Bump& bump, int k) {
    if (k < 0 || k > 4) throw DomainError("bump_h_derivative: order must lie in [0, 4]");
    const double u = (A - bump.B) / bump.delta;
    if (!(std::abs(u) < 1.0)) return 0.0;
    // g = -1/(1-u^2) = (1/(u-1) - 1/(u+1))/2, so g^{(j)} = (-1)^j j!/2 ((u-1)^{-j-1} - (u+1)^{-j-1}).
    double g[5];
    double fact = 1.0;
    for (int j = 1; j <= 4; ++j) {
        fact *= j;
        g[j] = ((j % 2) ? -1.0 : 1.0) * 0.5 * fact * (std::pow(u - 1.0, -j - 1) - std::pow(u + 1.0, -j - 1));
    }
    const double p[5] = {1.0, g[1], g[2] + g[1] * g[1], g[3] + 3.0 * g[1] * g[2] + g[1] * g[1] * g[1],
                         g[4] + 4.0 * g[1] * g[3] + 3.0 * g[2] * g[2] + 6.0 * g[1] * g[1] * g[2] + std::pow(g[1], 4)};
    return bump.scale * std::exp(-1.0 / (1.0 - u * u)) * p[k] * std::pow(bump.delta, -k);
}

cplx bump_transform(cplx s, const Bump& bump) {
    // A = B + delta tanh(tau); h dA = scale delta exp(-cosh^2 tau) sech^2 tau d tau.
    auto f = [&](double tau) -> cplx {
        const double c = std::cosh(tau);
        const double A = bump.B + bump.delta * std::tanh(tau);
        return bump.scale * bump.delta * std::exp(-c * c) / (c * c) * std::exp((s - 1.0) * std::log(kPi * A));
    };
    double h = 0.25;
    cplx sum = 0.0;
    double abs_sum = 0.0;
    for (int j = -16; j <= 16; ++j) {
        const cplx v = f(j * h);
        sum += v;
        abs_sum += std::abs(v);
    }
    cplx prev = sum * h;
    for (int level = 1; level <= 14; ++level) {
        h *= 0.5;
        const int n = static_cast<int>(std::lround(kTauMax / h));
        for (int j = -n + 1; j < n; j += 2) {
            const cplx v = f(j * h);
            sum += v;
            abs_sum += std::abs(v);
        }
        const cplx cur = sum * h;
        // Results below ~1e-14 of int |h| are rounding noise; convergence is judged on that scale.
        if (level >= 2 && std::abs(cur - prev) <= 1e-14 * abs_sum * h) return cur;
        prev = cur;
    }
    throw ConvergenceError("bump_transform: trapezoid did not converge", prev, 1e-14 * abs_sum * h);
}

void bump_nodes(const Bump& bump, std::vector<double>& A, std::vector<double>& w, int level) {
    if (level < 0 || level > 12) throw DomainError("bump_nodes: level must lie in [0, 12]");
    A.clear();
    w.clear();
    const double h = std::ldexp(1.0, -level);
    const int n = static_cast<int>(std::lround(kTauMax / h));
    for (int j = -n; j <= n; ++j) {
        const double tau = j * h;
        const double c = std::cosh(tau);
        const double a = bump.B + bump.delta * std::tanh(tau);
        const double weight = h * bump.scale * bump.delta * std::exp(-c * c) / (c * c);
        if (weight > 0.0) {
            A.push_back(a);
            w.push_back(weight);
        }
    }
}

double window_W(double t, double T, double alpha) {
    if (!(alpha > 0.0 && alpha < 0.01)) throw DomainError("window_W: alpha must lie in (0, 1/100)");
    t = std::abs(t);
    if (t == 0.0 || t >= 2.0 * T) return 0.0;
    const double two_m = 2.0 * std::ceil(1000.0 / alpha);
    // 1 - exp(-b^{2M}) with b^{2M} = exp(2M log b); exp overflows to inf and the factor to 1.
    auto factor = [two_m](double base) { return -std::expm1(-std::exp(two_m * std::log(base))); };
    const double f1 = factor(t / std::pow(2.0 * T, 1.0 - 0.5 * alpha));
    const double f2 = factor((4.0 * T * T - t * t) / (4.0 * std::pow(T, 2.0 - 0.5 * alpha)));
    return std::clamp(f1 * f2, 0.0, 1.0);
}

double window_Z(double u, double T, double alpha) {
    const double lo = std::pow(T, -2.0 * alpha), hi = std::pow(T, 2.0 * alpha);
    const double a = std::abs(u);
    if (!(a > lo && a < hi)) return 0.0;
    const double v = (2.0 * a - lo - hi) / (hi - lo);
    return std::exp(1.0 - 1.0 / (1.0 - v * v));
}

void WeightContour::validate() const {
    if (!(sigma > 0.0)) throw ValidationError("WeightContour: sigma must be positive");
    if (!(height >= 0.0)) throw ValidationError("WeightContour: height must be nonnegative");
    if (!(step >= 0.0)) throw ValidationError("WeightContour: step must be nonnegative");
}

bool in_bulk(double t, double T, double alpha) {
    const double edge = std::pow(T, 1.0 - alpha);
    return std::abs(t) > edge && std::abs(t) < 2.0 * T - edge;
}

cplx log_weight_Hcal(double t, double T) {
    const cplx i(0.0, 1.0);
    cplx v = 0.0;
    for (double sg : {1.0, -1.0}) v += log_gamma((0.5 + sg * i * t) / 2.0) + log_gamma((0.5 - 2.0 * i * T + sg * i * t) / 2.0);
    return v - 2.0 * log_gamma(0.5 - i * T) - log_gamma(0.5 - i * t);
}

cplx weight_Hcal(double t, double T, double alpha) {
    if (!in_bulk(t, T, alpha)) warn("weight_Hcal: t outside the bulk range");
    return std::exp(log_weight_Hcal(t, T));
}

cplx log_weight_Hcal_pm_gamma(cplx s, double t, double T, Sign sign) {
    const cplx i(0.0, 1.0);
    const double sg_T = sign == Sign::plus ? 1.0 : -1.0;
    cplx v = 0.0;
    for (double sg : {1.0, -1.0})
        v += log_gamma((s + 0.5 + sg_T * 2.0 * i * T + sg * i * t) / 2.0) + log_gamma((s + 0.5 + sg * i * t) / 2.0);
    return v - log_gamma(s + 0.5 + sg_T * i * T) - log_gamma(0.5 + i * T) - log_gamma(0.5 + i * t);
}

cplx weight_Hcal_pm(cplx s, double t, double T, const Bump& bump, Sign sign) {
    return bump_transform(1.0 - s, bump) * std::exp(log_weight_Hcal_pm_gamma(s, t, T, sign));
}

cplx log_G_afe(cplx w, double t, double T, Sign sign, Parity parity) {
    const cplx i(0.0, 1.0);
    const double a = parity == Parity::even ? 0.5 : 1.5;
    const double sg_T = sign == Sign::plus ? -1.0 : 1.0;
    cplx v = 0.0;
    for (double sg : {1.0, -1.0}) {
        v += log_gamma_R(a + w + sg * i * t) + log_gamma_R(a + sg_T * 2.0 * i * T + w + sg * i * t);
        v -= log_gamma_R(a + sg * i * t) + log_gamma_R(a - 2.0 * i * T + sg * i * t);
    }
    return v;
}

ContourKernel::ContourKernel(const std::function<cplx(cplx)>& log_f, double sigma, double height, double step) {
    if (!(sigma > 0.0 && height > 0.0)) throw DomainError("ContourKernel: sigma and height must be positive");
    if (step <= 0.0) step = 0.25;
    height_ = height;
    const int panels = std::max(2, static_cast<int>(std::ceil(2.0 * height / step)));
    std::vector<double> log_mod;
    auto build = [&](int order, std::vector<cplx>& nodes, std::vector<cplx>& logc) {
        std::vector<double> y, w;
        for (int p = 0; p < panels; ++p)
            append_gauss(order, -height + 2.0 * height * p / panels, -height + 2.0 * height * (p + 1) / panels, y, w);
        nodes.resize(y.size());
        logc.resize(y.size());
        log_mod.assign(y.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 16)
        for (std::size_t k = 0; k < y.size(); ++k) {
            nodes[k] = cplx(sigma, y[k]);
            // (1/2 pi i) F(w) i dy
            const cplx lf = log_f(nodes[k]);
            log_mod[k] = lf.real();
            logc[k] = lf + std::log(w[k] / kTwoPi);
        }
    };
    build(16, w16_, c16_);
    build(32, w32_, c32_);
    const cplx lo = log_f(cplx(sigma, -height)), hi = log_f(cplx(sigma, height));
    const double peak = *std::max_element(log_mod.begin(), log_mod.end());
    edge_log_ = std::max(lo.real(), hi.real());
    edge_ratio_ = std::exp(edge_log_ - peak);
}

ContourIntegral ContourKernel::eval(double X) const {
    const double lx = std::log(X);
    auto sum = [lx](const std::vector<cplx>& w, const std::vector<cplx>& c) {
        std::vector<cplx> terms(w.size());
        for (std::size_t k = 0; k < w.size(); ++k) terms[k] = std::exp(c[k] - w[k] * lx);
        return pairwise_sum_c(terms);
    };
    ContourIntegral r;
    r.value = sum(w32_, c32_);
    r.error = std::abs(r.value - sum(w16_, c16_));
    const double sigma = w32_.empty() ? 0.0 : w32_.front().real();
    // Unit decay length beyond the cut: the integrands here fall at least like e^{-|Im w|}.
    r.tail = 2.0 * std::exp(edge_log_ - sigma * lx) / kTwoPi;
    r.height = height_;
    return r;
}

namespace {

double default_V_height(double x_max) { return std::max(30.0, 10.0 * std::sqrt(std::log(std::max(x_max, 1.0)))); }

void check_tail(const ContourIntegral& r, const char* who) {
    if (r.error + r.tail > 1e-8) throw ConvergenceError(std::string(who) + ": truncation or quadrature error exceeds 1e-8", r.value, r.error + r.tail);
}

}  // namespace

ContourKernel kernel_V_pm(double t, double T, Sign sign, Parity parity, double x_max, const WeightContour& c) {
    c.validate();
    const double H = c.height > 0.0 ? c.height : default_V_height(x_max);
    return ContourKernel([=](cplx w) { return w * w + log_G_afe(w, t, T, sign, parity) - std::log(w); }, c.sigma, H, c.step);
}

ContourIntegral weight_V_pm(double x, double t, double T, Sign sign, Parity parity, const WeightContour& c) {
    if (!(x >= 1.0)) throw DomainError("weight_V_pm: x must be >= 1");
    const ContourIntegral r = kernel_V_pm(t, T, sign, parity, x, c).eval(x);
    check_tail(r, "weight_V_pm");
    return r;
}

ContourIntegral weight_V_leading(double x, double t, double T, Sign sign, const WeightContour& c) {
    c.validate();
    if (!(std::abs(t) < 2.0 * T)) throw DomainError("weight_V_leading: requires |t| < 2T");
    const double lq = std::log(std::abs(t) * std::sqrt(4.0 * T * T - t * t) / (4.0 * kPi * kPi));
    const double turn = sign == Sign::plus ? -0.5 * kPi : 0.5 * kPi;
    const double H = c.height > 0.0 ? c.height : default_V_height(x);
    const ContourKernel k([=](cplx w) { return w * w + cplx(0.0, turn) * w + w * lq - std::log(w); }, c.sigma, H, c.step);
    ContourIntegral r = k.eval(x);
    if (sign == Sign::minus) r.value *= leading_terms(0.0, t, T, Bump::make(2.0, 0.009, T)).Vminus_phase;
    return r;
}

ContourIntegral weight_Vcal_pm(double x, double t, double T, const Bump& bump, Sign sign, const WeightContour& c) {
    c.validate();
    if (!(x >= 1.0)) throw DomainError("weight_Vcal_pm: x must be >= 1");
    // The gamma part has modulus ~ e^{-pi T} on a plateau |Im s| <~ 2T + |t| and decays like e^{-pi |Im s|/2} beyond.
    const double H_full = 2.0 * T + std::abs(t) + 60.0;
    const ContourKernel U([=](cplx s) { return log_weight_Hcal_pm_gamma(s, t, T, sign) - std::log(s); }, c.sigma, H_full,
                          c.step);
    auto average = [&](int level, double& err) {
        std::vector<double> A, w;
        bump_nodes(bump, A, w, level);
        std::vector<cplx> terms(A.size());
        err = 0.0;
        for (std::size_t k = 0; k < A.size(); ++k) {
            const ContourIntegral u = U.eval(kPi * A[k] * x);
            terms[k] = w[k] * u.value;
            err += w[k] * (u.error + u.tail);
        }
        return pairwise_sum_c(terms);
    };
    double e3 = 0.0, e2 = 0.0;
    ContourIntegral full;
    full.value = average(3, e3);
    full.error = e3 + std::abs(full.value - average(2, e2));
    full.tail = e3;
    full.height = H_full;
    if (c.height == 0.0) return full;

    const ContourKernel K(
        [=](cplx s) { return std::log(bump_transform(1.0 - s, bump)) + log_weight_Hcal_pm_gamma(s, t, T, sign) - std::log(s); },
        c.sigma, c.height, c.step);
    ContourIntegral r = K.eval(x);
    r.tail = std::abs(full.value - r.value);
    return r;
}

LeadingTerms leading_terms(cplx s, double t, double T, const Bump& bump) {
    const double at = std::abs(t);
    if (!(at > 0.0 && at < 2.0 * T)) throw DomainError("leading_terms: requires 0 < |t| < 2T");
    const double q = at * std::sqrt(4.0 * T * T - t * t);
    LeadingTerms r;
    r.HH_plus = 8.0 * kPi * bump_transform(1.0 - s, bump) / q * std::exp(s * std::log(q / (4.0 * T)));
    const cplx i(0.0, 1.0);
    r.HH_minus = r.HH_plus * std::exp(2.0 * i * T * (std::log(T / (kPi * kPi)) - 1.0) - i * kPi * s);
    double phase = -4.0 * T * std::log(kTwoPi * std::numbers::e) - 0.5 * kPi;
    phase += (2.0 * T + t) * std::log(std::abs(2.0 * T + t)) + (2.0 * T - t) * std::log(std::abs(2.0 * T - t));
    r.Vminus_phase = std::polar(1.0, wrap_phase(phase));
    return r;
}

cplx Vminus_exact(double t, double T) { return std::exp(log_G_afe(0.0, t, T, Sign::minus, Parity::even)); }

cplx mellin_g(double x, double t, double T) {
    if (!(x > 0.0)) throw DomainError("mellin_g: x must be positive");
    if (x < 1e-12) warn("mellin_g: x below 1e-12, slow convergence near the origin");
    return panel_integral([=](double v) { return g_integrand(v, t, T); }, std::log(x), upper_log(x), 0.25, 20);
}

cplx mellin_G(cplx s, double t, double T) {
    const cplx i(0.0, 1.0);
    cplx v = (s - 2.5 + i * T) * std::log(2.0) - std::log(s) - log_gamma(s + 0.5 + i * T);
    for (double sg : {1.0, -1.0}) v += log_gamma((s + 0.5 + 2.0 * i * T + sg * i * t) / 2.0) + log_gamma((s + 0.5 + sg * i * t) / 2.0);
    return std::exp(v);
}

MellinPair g_mellin_pair(double x, cplx s, double t, double T) {
    if (!(s.real() > 0.0)) throw DomainError("g_mellin_pair: requires Re s > 0");
    return {mellin_g(x, t, T), mellin_G(s, t, T)};
}

cplx mellin_barnes_KK(cplx s, double mu_im, double nu_im) {
    const cplx i(0.0, 1.0);
    cplx v = (s - 3.0) * std::log(2.0) - log_gamma(s);
    for (double a : {1.0, -1.0})
        for (double b : {1.0, -1.0}) v += log_gamma((s + a * i * mu_im + b * i * nu_im) / 2.0);
    return std::exp(v);
}

cplx mellin_barnes_KK_quadrature(double s, double mu_im, double nu_im) {
    if (!(s > 0.0)) throw DomainError("mellin_barnes_KK_quadrature: requires s > 0");
    // In v = log x the integrand is e^{sv} K K, below 1e-17 once v < -40/s.
    return panel_integral([=](double v) { return std::exp(s * v) * kk_product(std::exp(v), mu_im, nu_im); },
                          -40.0 / s - 2.0, upper_log(1.0), 0.25, 20);
}

cplx mellin_g_transform_quadrature(double s, double t, double T) {
    if (!(s > 0.0)) throw DomainError("mellin_g_transform_quadrature: requires s > 0");
    const int order = 20;
    const double a = -40.0 / s - 2.0, b = upper_log(1.0);
    const int panels = static_cast<int>(std::ceil((b - a) / 0.25));
    auto edge = [&](int p) { return a + (b - a) * p / panels; };
    auto f = [=](double v) { return g_integrand(v, t, T); };
    // Inner tails: integral of the g-integrand over panels p.. end.
    std::vector<cplx> panel_int(panels);
#pragma omp parallel for schedule(dynamic)
    for (int p = 0; p < panels; ++p) {
        std::vector<double> x, w;
        append_gauss(order, edge(p), edge(p + 1), x, w);
        cplx acc = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) acc += w[k] * f(x[k]);
        panel_int[p] = acc;
    }
    std::vector<cplx> tail(panels + 1, 0.0);
    for (int p = panels - 1; p >= 0; --p) tail[p] = tail[p + 1] + panel_int[p];
    std::vector<cplx> outer(panels);
#pragma omp parallel for schedule(dynamic)
    for (int p = 0; p < panels; ++p) {
        std::vector<double> u, wu;
        append_gauss(order, edge(p), edge(p + 1), u, wu);
        cplx acc = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) {
            std::vector<double> v, wv;
            append_gauss(order, u[k], edge(p + 1), v, wv);
            cplx g = tail[p + 1];
            for (std::size_t j = 0; j < v.size(); ++j) g += wv[j] * f(v[j]);
            acc += wu[k] * g * std::exp(s * u[k]);
        }
        outer[p] = acc;
    }
    return pairwise_sum_c(outer);
}

}  // namespace eisenlab
