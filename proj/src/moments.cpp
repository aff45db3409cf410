#include "eisenlab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "eisenlab/arith.hpp"
#include "eisenlab/quadrature.hpp"
#include "eisenlab/specfun.hpp"

namespace eisenlab {

namespace {

// Bottom panels: d(log y)/dv <= v/y^2 <= 2/3 on v in [0, 1/2], so a v-width of w/0.67 keeps the phase budget of a
// top panel of log-width w.
constexpr double kBottomStretch = 0.67;
constexpr double kRoundoffFloor = 1e-14;

struct Node {
    double y, xlo, weight;
    bool fine;
    int panel;
};

// cos(2 pi k x), k = 0..n, by the three-term recurrence.
void cos_table(double x, int n, std::vector<double>& c) {
    c.resize(n + 1);
    c[0] = 1.0;
    if (n == 0) return;
    const double c1 = std::cos(kTwoPi * x);
    c[1] = c1;
    for (int k = 2; k <= n; ++k) c[k] = 2.0 * c1 * c[k - 1] - c[k - 2];
}

double oscillating_sum(const std::vector<double>& a, const std::vector<double>& c) {
    double s = 0.0;
    for (std::size_t n = 1; n <= a.size(); ++n) s += a[n - 1] * c[n];
    return 2.0 * s;
}

// Sub-panels resolving `cycles` oscillations on an interval, two per panel, at least one.
int sub_panels(double cycles, int refine) { return (static_cast<int>(std::ceil(cycles / 2.0)) + 1) * refine; }

// Generic point function: Gauss-Legendre in x on both arcs.
class FunctionRows : public RowSource {
public:
    FunctionRows(const PointFunction& f, double frequency, int refine) : f_(f), freq_(frequency), refine_(refine) {}
    int size() const override { return 1; }
    int x_nodes_per_unit(double) const override { return 16 * (static_cast<int>(std::ceil(freq_ / 2.0)) + 1) * refine_; }
    void eval(double y, double xlo, bool fine, double* out) const override {
        const int order = fine ? 32 : 16;
        const GaussRule& g = gauss_legendre(order);
        const int m = sub_panels((0.5 - xlo) * freq_, refine_);
        const double h = (0.5 - xlo) / m;
        std::vector<double> terms;
        terms.reserve(2 * m * order);
        for (int j = 0; j < m; ++j) {
            const double a = xlo + j * h;
            for (int i = 0; i < order; ++i) {
                const double x = a + 0.5 * h * (g.nodes[i] + 1.0);
                const double w = 0.5 * h * g.weights[i];
                terms.push_back(w * f_({x, y}));
                terms.push_back(w * f_({-x, y}));
            }
        }
        out[0] = pairwise_sum(terms.data(), terms.size());
    }

private:
    const PointFunction& f_;
    double freq_;
    int refine_;
};

// Quantities of E(., 1/2 + iT) on one horocycle; the "without" variants drop the constant term.
enum MomentQuantity {
    kReE2, kImE2, kReE2c, kImE2c,
    kAbs4, kAbs4c, kAbs2, kAbs2c, kAbs3, kAbs3c, kAbs1, kAbs1c,
    kHA2,  // |2 e(y) (E - e)|^2
    kMomentQuantities
};

class MomentRows : public RowSource {
public:
    explicit MomentRows(const EisensteinEvaluator& ev) : ev_(ev) {}
    int size() const override { return kMomentQuantities; }
    int x_nodes_per_unit(double y) const override {
        const int n = ev_.n_max(y);
        return y >= 1.0 ? 4 * n + 8 : 16 * (2 * n + 1);
    }

    void eval(double y, double xlo, bool fine, double* out) const override {
        const FourierRow r = ev_.row(y);
        const int n = static_cast<int>(r.coeff.size());
        const cplx c0 = r.constant, P = r.prefactor;
        std::fill(out, out + kMomentQuantities, 0.0);
        if (xlo == 0.0) {
            double S2 = 0.0;
            for (double a : r.coeff) S2 += a * a;
            const cplx e2 = c0 * c0 + 2.0 * P * P * S2, o2 = 2.0 * P * P * S2;
            out[kReE2] = e2.real();
            out[kImE2] = e2.imag();
            out[kReE2c] = o2.real();
            out[kImE2c] = o2.imag();
            out[kAbs2] = std::norm(c0) + 2.0 * std::norm(P) * S2;
            out[kAbs2c] = 2.0 * std::norm(P) * S2;
            out[kHA2] = 4.0 * std::norm(c0) * out[kAbs2c];
            // |E|^4 has modes up to 4n: the N-point trapezoid over a period is exact once N > 4n.
            const int N = 4 * n + 8;
            std::vector<double> tab(N);
            for (int j = 0; j < N; ++j) tab[j] = std::cos(kTwoPi * j / N);
            std::vector<double> q[6];
            for (auto& v : q) v.resize(N);
            for (int j = 0; j < N; ++j) {
                double s = 0.0;
                for (int k = 1; k <= n; ++k) s += r.coeff[k - 1] * tab[(static_cast<long long>(k) * j) % N];
                const double aw = std::abs(P * (2.0 * s)), ae = std::abs(c0 + P * (2.0 * s));
                q[0][j] = ae * ae * ae * ae;
                q[1][j] = aw * aw * aw * aw;
                q[2][j] = ae * ae * ae;
                q[3][j] = aw * aw * aw;
                q[4][j] = ae;
                q[5][j] = aw;
            }
            const int idx[6] = {kAbs4, kAbs4c, kAbs3, kAbs3c, kAbs1, kAbs1c};
            for (int i = 0; i < 6; ++i) out[idx[i]] = pairwise_sum(q[i].data(), N) / N;
            return;
        }
        // Arc xlo <= x <= 1/2, doubled by evenness in x.
        const int order = fine ? 32 : 16;
        const GaussRule& g = gauss_legendre(order);
        const int m = sub_panels((0.5 - xlo) * 4.0 * n, 1);
        const double h = (0.5 - xlo) / m;
        const int M = m * order;
        std::vector<double> terms[kMomentQuantities];
        for (auto& v : terms) v.resize(M);
        std::vector<double> c;
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < order; ++i) {
                const double x = xlo + j * h + 0.5 * h * (g.nodes[i] + 1.0);
                const double w = h * g.weights[i];  // 2 * (h/2) * weight
                cos_table(x, n, c);
                const cplx o = P * oscillating_sum(r.coeff, c), e = c0 + o;
                const cplx e2 = e * e, o2 = o * o;
                const double ae = std::abs(e), ao = std::abs(o);
                const int at = j * order + i;
                terms[kReE2][at] = w * e2.real();
                terms[kImE2][at] = w * e2.imag();
                terms[kReE2c][at] = w * o2.real();
                terms[kImE2c][at] = w * o2.imag();
                terms[kAbs4][at] = w * ae * ae * ae * ae;
                terms[kAbs4c][at] = w * ao * ao * ao * ao;
                terms[kAbs2][at] = w * ae * ae;
                terms[kAbs2c][at] = w * ao * ao;
                terms[kAbs3][at] = w * ae * ae * ae;
                terms[kAbs3c][at] = w * ao * ao * ao;
                terms[kAbs1][at] = w * ae;
                terms[kAbs1c][at] = w * ao;
                terms[kHA2][at] = w * 4.0 * std::norm(c0) * ao * ao;
            }
        }
        for (int k = 0; k < kMomentQuantities; ++k) out[k] = pairwise_sum(terms[k].data(), M);
    }

private:
    const EisensteinEvaluator& ev_;
};

// int E1 E2 and int (E1 - e1)(E2 - e2) for two real-valued rows.
class ProductRows : public RowSource {
public:
    ProductRows(const RealEisenstein& a, const RealEisenstein& b) : a_(a), b_(b) {}
    int size() const override { return 2; }
    int x_nodes_per_unit(double y) const override {
        const int n = std::max(a_.n_max(y), b_.n_max(y));
        return 16 * (n + 1);
    }
    void eval(double y, double xlo, bool fine, double* out) const override {
        const FourierRow ra = a_.row(y), rb = b_.row(y);
        const double ca = ra.constant.real(), cb = rb.constant.real();
        const double Pa = ra.prefactor.real(), Pb = rb.prefactor.real();
        if (xlo == 0.0) {
            double S = 0.0;
            const std::size_t n = std::min(ra.coeff.size(), rb.coeff.size());
            for (std::size_t k = 0; k < n; ++k) S += ra.coeff[k] * rb.coeff[k];
            out[1] = 2.0 * Pa * Pb * S;
            out[0] = ca * cb + out[1];
            return;
        }
        const int order = fine ? 32 : 16;
        const GaussRule& g = gauss_legendre(order);
        const int nmax = static_cast<int>(std::max(ra.coeff.size(), rb.coeff.size()));
        const int m = sub_panels((0.5 - xlo) * 2.0 * nmax, 1);
        const double h = (0.5 - xlo) / m;
        std::vector<double> t0, t1, c;
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < order; ++i) {
                const double x = xlo + j * h + 0.5 * h * (g.nodes[i] + 1.0);
                const double w = h * g.weights[i];
                cos_table(x, nmax, c);
                const double oa = Pa * oscillating_sum(ra.coeff, c), ob = Pb * oscillating_sum(rb.coeff, c);
                t0.push_back(w * (ca + oa) * (cb + ob));
                t1.push_back(w * oa * ob);
            }
        }
        out[0] = pairwise_sum(t0.data(), t0.size());
        out[1] = pairwise_sum(t1.data(), t1.size());
    }

private:
    const RealEisenstein& a_;
    const RealEisenstein& b_;
};

// Quantity `with` on panels at or below A, `without` above.
Integral truncated(const RowIntegration& ri, int with, int without, double A) {
    const Integral lo = ri.sum(with, [A](const Panel& p) { return p.bottom || p.y_hi <= A; });
    const Integral hi = ri.sum(without, [A](const Panel& p) { return !p.bottom && p.y_hi > A; });
    return {lo.value + hi.value, lo.est_error + hi.est_error};
}

double fourth_prediction(double T) {
    const double L = std::log(T);
    return 36.0 / kPi * L * L;
}

}  // namespace

void IntegrateOptions::validate() const {
    if (!(log_width > 0.0)) throw ValidationError("IntegrateOptions: log_width must be positive");
    if (refine < 1) throw ValidationError("IntegrateOptions: refine must be >= 1");
    if (!(x_frequency > 0.0)) throw ValidationError("IntegrateOptions: x_frequency must be positive");
    if (max_refinements < 0) throw ValidationError("IntegrateOptions: max_refinements must be >= 0");
}

Integral RowIntegration::sum(int k, const std::function<bool(const Panel&)>& keep) const {
    std::vector<double> v, e;
    for (std::size_t i = 0; i < grid.panels.size(); ++i) {
        if (!keep(grid.panels[i])) continue;
        v.push_back(value[i][k]);
        e.push_back(error[i][k]);
    }
    return {pairwise_sum(v.data(), v.size()), pairwise_sum(e.data(), e.size())};
}

Integral RowIntegration::sum(int k) const {
    return sum(k, [](const Panel&) { return true; });
}

RowIntegration integrate_rows(const RowSource& rows, double y_max, const IntegrateOptions& opt) {
    opt.validate();
    if (!(y_max > 1.0)) throw DomainError("integrate_rows: y_max must exceed 1");
    const int K = rows.size();
    const double w = opt.log_width / opt.refine;

    RowIntegration out;
    out.grid.y_max = y_max;
    std::vector<std::pair<double, double>> var;  // panel extent in its own variable

    const int nb = static_cast<int>(std::ceil(0.5 / (w / kBottomStretch)));
    for (int i = 0; i < nb; ++i) {
        const double v0 = 0.5 * i / nb, v1 = 0.5 * (i + 1) / nb;
        Panel p;
        p.y_lo = std::sqrt(1.0 - v1 * v1);
        p.y_hi = std::sqrt(1.0 - v0 * v0);
        p.bottom = true;
        out.grid.panels.push_back(p);
        var.emplace_back(v0, v1);
    }
    std::vector<double> edges{1.0, y_max};
    for (double b : opt.breakpoints)
        if (b > 1.0 && b < y_max) edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        const double a = edges[e], b = edges[e + 1];
        const double L = std::log(b / a);
        const int n = std::max(1, static_cast<int>(std::ceil(L / w - 1e-9)));
        for (int j = 0; j < n; ++j) {
            Panel p;
            p.y_lo = j == 0 ? a : a * std::exp(L * j / n);
            p.y_hi = j == n - 1 ? b : a * std::exp(L * (j + 1) / n);
            out.grid.panels.push_back(p);
            var.emplace_back(std::log(p.y_lo), std::log(p.y_hi));
        }
    }

    std::vector<Node> nodes;
    for (std::size_t i = 0; i < out.grid.panels.size(); ++i) {
        Panel& p = out.grid.panels[i];
        p.x_nodes_per_unit = rows.x_nodes_per_unit(p.y_lo);
        for (int order : {16, 32}) {
            const GaussRule& g = gauss_legendre(order);
            const double u0 = var[i].first, u1 = var[i].second, hw = 0.5 * (u1 - u0);
            for (int j = 0; j < order; ++j) {
                const double u = u0 + hw * (g.nodes[j] + 1.0);
                Node nd{};
                nd.fine = order == 32;
                nd.panel = static_cast<int>(i);
                if (p.bottom) {
                    nd.y = std::sqrt(1.0 - u * u);
                    nd.xlo = u;
                    nd.weight = hw * g.weights[j] * u / (nd.y * nd.y * nd.y);
                } else {
                    nd.y = std::exp(u);
                    nd.xlo = 0.0;
                    nd.weight = hw * g.weights[j] / nd.y;
                }
                nodes.push_back(nd);
            }
        }
    }

    const long long N = static_cast<long long>(nodes.size());
    std::vector<double> vals(static_cast<std::size_t>(N) * K);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < N; ++i) {
        try {
            rows.eval(nodes[i].y, nodes[i].xlo, nodes[i].fine, &vals[static_cast<std::size_t>(i) * K]);
        } catch (...) {
#pragma omp critical(eisenlab_rows_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    const std::size_t P = out.grid.panels.size();
    out.value.assign(P, std::vector<double>(K));
    out.error.assign(P, std::vector<double>(K));
    std::vector<double> t16, t32, mag;
    std::size_t at = 0;
    for (std::size_t i = 0; i < P; ++i) {
        // Nodes of panel i are contiguous: 16 coarse then 32 fine.
        for (int k = 0; k < K; ++k) {
            t16.clear();
            t32.clear();
            mag.clear();
            for (std::size_t j = at; j < at + 48; ++j) {
                const double c = nodes[j].weight * vals[j * K + k];
                (nodes[j].fine ? t32 : t16).push_back(c);
                if (nodes[j].fine) mag.push_back(std::abs(c));
            }
            const double i16 = pairwise_sum(t16.data(), t16.size()), i32 = pairwise_sum(t32.data(), t32.size());
            out.value[i][k] = i32;
            out.error[i][k] = std::abs(i32 - i16) + kRoundoffFloor * pairwise_sum(mag.data(), mag.size());
        }
        at += 48;
    }
    std::vector<double> errs;
    for (std::size_t i = 0; i < P; ++i)
        for (int k = 0; k < K; ++k) errs.push_back(out.error[i][k]);
    out.grid.est_error = pairwise_sum(errs.data(), errs.size());
    return out;
}

FIntegral integrate_F(const PointFunction& f, double y_max, double tol, const IntegrateOptions& opt) {
    opt.validate();
    if (!(y_max >= 2.0)) throw DomainError("integrate_F: y_max must be at least 2");
    if (!(tol > 0.0)) throw ValidationError("integrate_F: tol must be positive");
    FIntegral best;
    for (int r = 0; r <= opt.max_refinements; ++r) {
        IntegrateOptions o = opt;
        o.refine = opt.refine << r;
        const FunctionRows rows(f, o.x_frequency, o.refine);
        const RowIntegration ri = integrate_rows(rows, y_max, o);
        const Integral s = ri.sum(0);
        best.value = s.value + opt.tail_constant / y_max;
        best.est_error = s.est_error;
        best.grid = ri.grid;
        best.grid.est_error = s.est_error;
        if (best.est_error <= tol * std::max(std::abs(best.value), std::numeric_limits<double>::min())) return best;
    }
    throw ConvergenceError("integrate_F: tolerance not met", best.value, best.est_error);
}

RealEisenstein::RealEisenstein(double s) : s_(s) {
    if (!(s > 1.0 && s <= 4.0)) throw DomainError("RealEisenstein: s must lie in (1, 4]");
    phi_ = scattering_phi(cplx(s, 0.0)).real();
    prefactor_ = 2.0 / xi(cplx(2.0 * s, 0.0)).to_complex().real();
}

int RealEisenstein::n_max(double y) const { return static_cast<int>(std::ceil(45.0 / (kTwoPi * y))) + 2; }

double RealEisenstein::constant_term(double y) const {
    if (!(y > 0.0)) throw DomainError("RealEisenstein: y must be positive");
    return std::pow(y, s_) + phi_ * std::pow(y, 1.0 - s_);
}

FourierRow RealEisenstein::row(double y) const {
    FourierRow r;
    r.y = y;
    r.constant = constant_term(y);
    r.prefactor = prefactor_;
    const int n = n_max(y);
    r.coeff.resize(n);
    const double sy = std::sqrt(y), nu = s_ - 0.5;
    for (int k = 1; k <= n; ++k) {
        double sigma = 0.0;
        for (long long d : default_divisors().divisors(k)) sigma += std::pow(static_cast<double>(d), 1.0 - 2.0 * s_);
        r.coeff[k - 1] = std::pow(static_cast<double>(k), nu) * sigma * sy * bessel_k_real(nu, kTwoPi * k * y);
    }
    return r;
}

double RealEisenstein::eval(Point z) const {
    const FourierRow r = row(z.y);
    return (r.constant + r.oscillating(z.x)).real();
}

cplx maass_selberg(cplx s1, cplx s2, double A) {
    if (!(A > 1.0)) throw DomainError("maass_selberg: A must exceed 1");
    if (std::abs(s1 - s2) < 1e-12 || std::abs(s1 + s2 - 1.0) < 1e-12)
        throw DomainError("maass_selberg: degenerate parameters, use maass_selberg_limit");
    const double L = std::log(A);
    const cplx p1 = scattering_phi(s1), p2 = scattering_phi(s2);
    const cplx a = s1 + s2 - 1.0, b = s1 - s2;
    return (std::exp(a * L) - p1 * p2 * std::exp(-a * L)) / a + (p2 * std::exp(b * L) - p1 * std::exp(-b * L)) / b;
}

cplx maass_selberg_limit(double T, double A) {
    if (!(T > 0.0)) throw DomainError("maass_selberg_limit: T must be positive");
    if (!(A > 1.0)) throw DomainError("maass_selberg_limit: A must exceed 1");
    const cplx s(0.5, T);
    const cplx phi = scattering_phi(s), ld = scattering_phi_log_deriv(s);
    const double L = std::log(A);
    const cplx up = std::polar(1.0, 2.0 * T * L);
    return phi * (2.0 * L - ld) + (up - phi * phi * std::conj(up)) / cplx(0.0, 2.0 * T);
}

FIntegral maass_selberg_quadrature(double s1, double s2, double A, double tol) {
    if (!(A > 1.0)) throw DomainError("maass_selberg_quadrature: A must exceed 1");
    const RealEisenstein e1(s1), e2(s2);
    const ProductRows rows(e1, e2);
    IntegrateOptions opt;
    opt.breakpoints = {A};
    // Above A only Bessel modes remain, e^{-2 pi y}-small by y = A + 8.
    const double y_max = A + 8.0;
    FIntegral best;
    for (int r = 0; r <= opt.max_refinements; ++r) {
        IntegrateOptions o = opt;
        o.refine = 1 << r;
        const RowIntegration ri = integrate_rows(rows, y_max, o);
        const Integral s = truncated(ri, 0, 1, A);
        best = {s.value, s.est_error, ri.grid};
        best.grid.est_error = s.est_error;
        if (s.est_error <= tol * std::abs(s.value)) return best;
    }
    throw ConvergenceError("maass_selberg_quadrature: tolerance not met", best.value, best.est_error);
}

double moment_y_max(double T, double A) { return A + (T + 20.0 * std::cbrt(T)) / kTwoPi + 5.0; }

std::vector<MomentSet> moment_sweep(const SpectralSetup& setup, const std::vector<double>& A_list, double tol,
                                    const IntegrateOptions& opt) {
    setup.validate();
    opt.validate();
    if (A_list.empty()) throw ValidationError("moment_sweep: empty A list");
    if (!(tol > 0.0)) throw ValidationError("moment_sweep: tol must be positive");
    for (double A : A_list)
        if (!(A > 1.0)) throw ValidationError("moment_sweep: every A must exceed 1");
    const double T = setup.T;
    SpectralSetup s = setup;
    s.A = *std::max_element(A_list.begin(), A_list.end());
    const EisensteinEvaluator ev(s);
    const MomentRows rows(ev);
    const double y_max = moment_y_max(T, s.A);

    IntegrateOptions o = opt;
    // |E|^4 carries y^{+-2iT} twice: up to 4T radians per unit log y; ten radians per panel.
    o.log_width = std::min(opt.log_width, 10.0 / (4.0 * T + 8.0));
    o.breakpoints.insert(o.breakpoints.end(), A_list.begin(), A_list.end());
    const double L = std::log(T);

    std::vector<MomentSet> out;
    double worst = 0.0, worst_value = 0.0;
    for (int r = 0; r <= 2; ++r) {
        o.refine = opt.refine << r;
        const RowIntegration ri = integrate_rows(rows, y_max, o);
        out.clear();
        bool ok = true;
        for (double A : A_list) {
            MomentSet m;
            m.y_max = y_max;
            m.grid = ri.grid;
            const Integral f4 = truncated(ri, kAbs4, kAbs4c, A);
            m.fourth = {T, A, 4, f4.value, f4.est_error, fourth_prediction(T), f4.value / fourth_prediction(T)};
            const Integral re = truncated(ri, kReE2, kReE2c, A), im = truncated(ri, kImE2, kImE2c, A);
            m.second_integral = {re.value, im.value};
            m.second_error = std::hypot(re.est_error, im.est_error);
            const double v2 = std::abs(m.second_integral);
            m.second = {T, A, 2, v2, m.second_error, 2.0 * L, v2 / (2.0 * L)};
            m.second_closed_form = maass_selberg_limit(T, A);
            m.l2_norm = truncated(ri, kAbs2, kAbs2c, A).value;
            m.HA_norm = ri.sum(kHA2, [A](const Panel& p) { return !p.bottom && p.y_lo >= A; }).value;
            m.constant_projection = 3.0 / kPi * v2 * v2;
            m.constant_projection_prediction = 12.0 / kPi * L * L;
            const double rel4 = f4.est_error / f4.value, rel2 = m.second_error / v2;
            if (!(rel4 <= tol && rel2 <= tol)) {
                ok = false;
                if (rel4 > worst) {
                    worst = rel4;
                    worst_value = f4.value;
                }
            }
            out.push_back(m);
        }
        if (ok) return out;
    }
    throw ConvergenceError("moment_sweep: tolerance not met", worst_value, worst * worst_value);
}

MomentSet moment_set(const SpectralSetup& setup, double tol, const IntegrateOptions& opt) {
    return moment_sweep(setup, {setup.A}, tol, opt).front();
}

MomentReport fourth_moment(const SpectralSetup& setup, double tol) { return moment_set(setup, tol).fourth; }

SmoothedMoment smoothed_fourth_moment(const SpectralSetup& setup, const Bump& bump, double tol) {
    setup.validate();
    if (!(bump.lo() >= 1.0)) throw DomainError("smoothed_fourth_moment: bump support must lie above y = 1");
    std::vector<double> Ak, wk;
    bump_nodes(bump, Ak, wk, 2);
    const double T = setup.T, B = bump.B, lo = bump.lo(), hi = bump.hi();
    SpectralSetup s = setup;
    s.A = hi;
    const EisensteinEvaluator ev(s);
    const MomentRows rows(ev);
    const double y_max = moment_y_max(T, hi);
    IntegrateOptions o;
    o.log_width = 10.0 / (4.0 * T + 8.0);
    o.breakpoints = Ak;
    o.breakpoints.insert(o.breakpoints.end(), {lo, B, hi});

    SmoothedMoment out;
    out.nodes = static_cast<int>(Ak.size());
    out.hhat0 = bump.hhat0();
    out.prediction = out.hhat0 * fourth_prediction(T);
    const double h0 = out.hhat0;
    auto in_shell = [lo, hi](const Panel& p) { return !p.bottom && p.y_lo >= lo && p.y_hi <= hi; };

    for (int r = 0; r <= 2; ++r) {
        o.refine = 1 << r;
        const RowIntegration ri = integrate_rows(rows, y_max, o);
        const Integral fB = truncated(ri, kAbs4, kAbs4c, B);
        out.at_B = h0 * fB.value;
        out.direct = out.at_B;

        // Shell sums of |E_A|^p at one A.
        auto shell_sum = [&](int with, int without, double A) {
            const double below = ri.sum(with, [&](const Panel& p) { return in_shell(p) && p.y_hi <= A; }).value;
            const double above = ri.sum(without, [&](const Panel& p) { return in_shell(p) && p.y_hi > A; }).value;
            return below + above;
        };
        out.I1 = h0 * ri.sum(kAbs4, [lo](const Panel& p) { return p.bottom || p.y_hi <= lo; }).value;
        out.I2 = h0 * shell_sum(kAbs4, kAbs4c, B);
        out.I3 = h0 * ri.sum(kAbs4c, [hi](const Panel& p) { return !p.bottom && p.y_lo >= hi; }).value;

        const double beta = 2.0 * std::sqrt(hi);
        const double mu_shell = 1.0 / lo - 1.0 / hi;
        double value = 0.0, err = 0.0, wsum = 0.0, shell = 0.0, bound = 0.0, sens = 0.0;
        for (std::size_t k = 0; k < Ak.size(); ++k) {
            const Integral f = truncated(ri, kAbs4, kAbs4c, Ak[k]);
            value += wk[k] * f.value;
            err += wk[k] * f.est_error;
            wsum += wk[k];
            shell += wk[k] * shell_sum(kAbs4, kAbs4c, Ak[k]);
            const double m3 = shell_sum(kAbs3, kAbs3c, Ak[k]), m2 = shell_sum(kAbs2, kAbs2c, Ak[k]),
                         m1 = shell_sum(kAbs1, kAbs1c, Ak[k]);
            bound += wk[k] * (4.0 * beta * m3 + 6.0 * beta * beta * m2 + 4.0 * beta * beta * beta * m1 +
                              beta * beta * beta * beta * mu_shell);
            sens = std::max(sens, std::abs(f.value - fB.value));
        }
        out.value = value;
        out.est_error = err;
        out.shell = shell;
        out.shell_bound = bound + std::abs(h0 - wsum) * out.I2 / h0;
        out.A_sensitivity = sens;
        out.reassembly_residual = value - (wsum * (out.I1 + out.I3) / h0 + shell);
        if (err <= tol * value) return out;
    }
    throw ConvergenceError("smoothed_fourth_moment: tolerance not met", out.value, out.est_error);
}

TruncationDifference truncation_difference(const SpectralSetup& setup, double A, double B, int samples_per_axis) {
    if (!(A > 1.0 && B > 1.0)) throw DomainError("truncation_difference: A and B must exceed 1");
    if (samples_per_axis < 2) throw ValidationError("truncation_difference: need at least 2 samples per axis");
    SpectralSetup s = setup;
    s.A = std::max(A, B);
    const EisensteinEvaluator ev(s);
    TruncationDifference out;
    const double ytop = std::max(A, B) + 1.0;
    for (int i = 0; i < samples_per_axis; ++i) {
        const double y = 1.0 + (ytop - 1.0) * (i + 0.5) / samples_per_axis;
        const FourierRow r = ev.row(y);
        for (int j = 0; j < samples_per_axis; ++j) {
            const double x = -0.5 + (j + 0.5) / samples_per_axis;
            const cplx osc = r.oscillating(x);
            const cplx EA = y > A ? osc : r.constant + osc, EB = y > B ? osc : r.constant + osc;
            const double d = std::abs(EB - EA);
            ++out.samples;
            if (d > 0.0) ++out.nonzero;
            out.max_ratio = std::max(out.max_ratio, d / std::sqrt(y));
        }
    }
    return out;
}

}  // namespace eisenlab
