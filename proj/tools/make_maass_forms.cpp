// Generates data/maass_forms.csv: level-one Hecke-Maass forms by Hejhal's method.
//
// Phase 1 solves the collocation system at several heights; eigenvalues are the zeros of c_2(Ya) - c_2(Yb).
// Phase 2 extends the two lowest forms to many coefficients by sampling the phase-1 expansion at pullbacks of
// low horocycles. L(1, sym^2 u) comes from the Petersson norm of the Fourier expansion with rho(1) = 1.
// None of this is used by the library; the CSV is the artifact's data source.

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eisenlab/eisenstein.hpp"
#include "eisenlab/maass_form.hpp"
#include "eisenlab/moments.hpp"
#include "eisenlab/quadrature.hpp"
#include "eisenlab/specfun.hpp"

using namespace eisenlab;

namespace {

PrecisionPolicy tight() {
    PrecisionPolicy p;
    p.rel_tol = 1e-13;
    return p;
}

double cs(Parity parity, double x) { return parity == Parity::even ? std::cos(kTwoPi * x) : std::sin(kTwoPi * x); }

// Collocation points x_m = (m - 1/2)/(2Q) at height Y and their pullbacks into F.
struct Samples {
    double Y = 0.0;
    std::vector<double> x, xs, ys;
};

Samples samples(double Y, int Q) {
    Samples s;
    s.Y = Y;
    for (int m = 1; m <= Q; ++m) {
        const double x = (m - 0.5) / (2.0 * Q);
        const Reduction r = reduce({x, Y});
        s.x.push_back(x);
        s.xs.push_back(r.z.x);
        s.ys.push_back(r.z.y);
    }
    return s;
}

int modes_at(double r, double Y) { return static_cast<int>(std::ceil((r + 35.0) / (kTwoPi * Y))); }

// Bessel data of the collocation system at one (r, Y), shared by both parities.
struct Tables {
    double Y = 0.0;
    int M = 0, Q = 0;
    Samples s;
    Eigen::MatrixXd K;     // sqrt(y*) K~(2 pi l y*) at pullback m, mode l
    std::vector<double> diag;  // sqrt(Y) K~(2 pi n Y)
};

Tables tables(double r, double Y) {
    Tables t;
    t.Y = Y;
    t.M = modes_at(r, Y);
    t.Q = t.M + 15;
    t.s = samples(Y, t.Q);
    const PrecisionPolicy pol = tight();
    t.K.resize(t.Q, t.M);
    for (int m = 0; m < t.Q; ++m)
        for (int l = 1; l <= t.M; ++l) t.K(m, l - 1) = std::sqrt(t.s.ys[m]) * bessel_k_scaled(r, kTwoPi * l * t.s.ys[m], pol);
    for (int n = 1; n <= t.M; ++n) t.diag.push_back(std::sqrt(Y) * bessel_k_scaled(r, kTwoPi * n * Y, pol));
    return t;
}

// c_1 = 1, c_2..c_M from the (M-1) x (M-1) system.
std::vector<double> phase1(const Tables& t, Parity parity) {
    const int M = t.M, Q = t.Q;
    Eigen::MatrixXd K(Q, M);
    for (int m = 0; m < Q; ++m)
        for (int l = 1; l <= M; ++l) K(m, l - 1) = t.K(m, l - 1) * cs(parity, l * t.s.xs[m]);
    Eigen::MatrixXd C(M, Q);
    for (int n = 1; n <= M; ++n)
        for (int m = 0; m < Q; ++m) C(n - 1, m) = 2.0 / Q * cs(parity, n * t.s.x[m]);
    Eigen::MatrixXd V = -C * K;
    for (int n = 1; n <= M; ++n) V(n - 1, n - 1) += t.diag[n - 1];
    const Eigen::MatrixXd A = V.block(1, 1, M - 1, M - 1);
    const Eigen::VectorXd b = -V.block(1, 0, M - 1, 1);
    const Eigen::VectorXd c = A.partialPivLu().solve(b);
    std::vector<double> out(M + 1, 0.0);
    out[1] = 1.0;
    for (int n = 2; n <= M; ++n) out[n] = c(n - 2);
    return out;
}

std::vector<double> phase1(double r, Parity parity, double Y) { return phase1(tables(r, Y), parity); }

// Three heights: each collocation system is singular at its own spurious r, and a spurious pole next to a
// true root can hide the sign change, so every pair is scanned and the validated roots are merged.
constexpr double kY1 = 0.12;
constexpr double kHeights[3] = {0.12, 0.107, 0.095};
constexpr int kPairs[3][2] = {{0, 2}, {0, 1}, {1, 2}};

double mismatch(double r, Parity parity, double ya, double yb) { return phase1(r, parity, ya)[2] - phase1(r, parity, yb)[2]; }

struct Found {
    double r;
    Parity parity;
    std::vector<double> c;  // accurate prefix from phase 1
    double residual;        // max of height mismatch and Hecke residuals
};

double hecke_residual(const std::vector<double>& c) {
    return std::max({std::abs(c[2] * c[3] - c[6]), std::abs(c[2] * c[2] - 1.0 - c[4]), std::abs(c[2] * c[5] - c[10]),
                     std::abs(c[3] * c[3] - 1.0 - c[9])});
}

// Brent on the mismatch inside a sign change.
double refine(double a, double b, Parity parity, double ya, double yb) {
    double fa = mismatch(a, parity, ya, yb), fb = mismatch(b, parity, ya, yb);
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < 80; ++it) {
        if ((fb > 0) == (fc > 0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol = 1e-14 * std::abs(b), m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0) return b;
        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
            const double s = fb / fa;
            double p, q;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc, rr = fb / fc;
                p = s * (2.0 * m * qq * (qq - rr) - (b - a) * (rr - 1.0));
                q = (qq - 1.0) * (rr - 1.0) * (s - 1.0);
            }
            if (p > 0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol ? d : (m > 0 ? tol : -tol);
        fb = mismatch(b, parity, ya, yb);
    }
    return b;
}

// Extends the coefficients to n <= N by sampling the expansion at pullbacks of horocycles at height Y,
// chosen per block so that 2 pi n Y sits just past the turning point of K_{ir}.
std::vector<double> phase2(double r, Parity parity, const std::vector<double>& c1, int N, double shrink) {
    const PrecisionPolicy pol = tight();
    const int L = static_cast<int>(std::ceil((r + 40.0) / (kTwoPi * std::sqrt(3.0) / 2.0)));
    std::vector<double> out(N + 1, 0.0);
    const int n_direct = std::min(N, static_cast<int>(std::floor(r / (kTwoPi * kY1))));
    for (int n = 1; n <= n_direct; ++n) out[n] = c1[n];
    int lo = n_direct + 1;
    while (lo <= N) {
        const int hi = std::min(N, static_cast<int>(std::ceil(1.25 * lo)));
        const double Y = shrink * (r + 2.0) / (kTwoPi * lo);
        const int Q = modes_at(r, Y) + hi + 10;
        const Samples s = samples(Y, Q);
        std::vector<double> f(Q);
        for (int m = 0; m < Q; ++m) {
            double v = 0.0;
            for (int l = 1; l <= L; ++l)
                v += c1[l] * bessel_k_scaled(r, kTwoPi * l * s.ys[m], pol) * cs(parity, l * s.xs[m]);
            f[m] = std::sqrt(s.ys[m]) * v;
        }
        for (int n = lo; n <= hi; ++n) {
            double acc = 0.0;
            for (int m = 0; m < Q; ++m) acc += f[m] * cs(parity, n * s.x[m]);
            out[n] = 2.0 / Q * acc / (std::sqrt(Y) * bessel_k_scaled(r, kTwoPi * n * Y, pol));
        }
        lo = hi + 1;
    }
    return out;
}

// |u0|^2 one horocycle at a time: Parseval on the upper strip, Gauss-Legendre in x on the arcs below y = 1.
class NormRows : public RowSource {
public:
    NormRows(double r, Parity parity, const std::vector<double>& c)
        : r_(r), parity_(parity), c_(c), L_(static_cast<int>(std::ceil((r + 40.0) / (kTwoPi * std::sqrt(3.0) / 2.0)))) {}
    int size() const override { return 1; }
    int x_nodes_per_unit(double) const override { return 32 * (L_ + 1); }
    void eval(double y, double xlo, bool fine, double* out) const override {
        const PrecisionPolicy pol = tight();
        std::vector<double> a(L_ + 1, 0.0);
        for (int l = 1; l <= L_; ++l) a[l] = 2.0 * c_[l] * std::sqrt(y) * bessel_k_scaled(r_, kTwoPi * l * y, pol);
        if (xlo == 0.0) {
            double s = 0.0;
            for (int l = 1; l <= L_; ++l) s += 0.5 * a[l] * a[l];
            out[0] = s;
            return;
        }
        const int order = fine ? 32 : 16, panels = L_ + 1;
        const GaussRule& g = gauss_legendre(order);
        const double h = (0.5 - xlo) / panels;
        double s = 0.0;
        for (int j = 0; j < panels; ++j)
            for (int i = 0; i < order; ++i) {
                const double x = xlo + j * h + 0.5 * h * (g.nodes[i] + 1.0);
                double v = 0.0;
                for (int l = 1; l <= L_; ++l) v += a[l] * cs(parity_, l * x);
                s += h * g.weights[i] * v * v;  // both arcs: |u|^2 is even in x
            }
        out[0] = s;
    }

private:
    double r_;
    Parity parity_;
    const std::vector<double>& c_;
    int L_;
};

// L(1, sym^2 u) = 2 cosh(pi r) <u0, u0> with u0 = sum_{m != 0} lambda(m) sqrt(y) K_{ir}(2 pi |m| y) e(mx).
double sym2_L1(double r, Parity parity, const std::vector<double>& c) {
    const NormRows rows(r, parity, c);
    IntegrateOptions opt;
    opt.log_width = 0.1;
    const RowIntegration ri = integrate_rows(rows, 10.0, opt);
    const Integral norm = ri.sum(0);
    if (norm.est_error > 1e-10 * norm.value) std::fprintf(stderr, "warning: norm error %.2e at r=%.6f\n", norm.est_error, r);
    return (1.0 + std::exp(-kTwoPi * r)) * norm.value;  // 2 cosh(pi r) e^{-pi r}; K~ carries e^{pi r/2}
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compute level-one Hecke-Maass form data"};
    double r_lo = 9.0, r_hi = 26.0, step = 0.01;
    int N = 10000, n_small = 12;
    std::string out = "data/maass_forms.csv";
    app.add_option("--r-lo", r_lo);
    app.add_option("--r-hi", r_hi);
    app.add_option("--step", step);
    app.add_option("--n-extended", N, "coefficients for the lowest even and odd forms");
    app.add_option("--n-small", n_small, "coefficients for the other forms");
    app.add_option("--out", out);
    CLI11_PARSE(app, argc, argv);

    std::vector<Found> found;
    // Mismatch of both parities on the scan grid; the Bessel tables are shared.
    std::vector<double> grid;
    std::vector<double> c2[2][3];  // [parity][height]
    for (int k = 0; r_lo + k * step <= r_hi + 1e-12; ++k) {
        const double r = r_lo + k * step;
        grid.push_back(r);
        for (int h = 0; h < 3; ++h) {
            const Tables t = tables(r, kHeights[h]);
            for (int p = 0; p < 2; ++p) c2[p][h].push_back(phase1(t, p == 0 ? Parity::even : Parity::odd)[2]);
        }
    }
    for (Parity parity : {Parity::even, Parity::odd}) {
        const int pi = parity == Parity::even ? 0 : 1;
        for (const auto& pair : kPairs) {
            const double ya = kHeights[pair[0]], yb = kHeights[pair[1]];
            const std::vector<double>&ca = c2[pi][pair[0]], &cb = c2[pi][pair[1]];
            for (std::size_t k = 1; k < grid.size(); ++k) {
                const double prev = ca[k - 1] - cb[k - 1], cur = ca[k] - cb[k];
                if ((cur > 0) == (prev > 0)) continue;
                if (std::abs(prev) + std::abs(cur) > 4.0) continue;  // jump across a spurious pole
                const double root = refine(grid[k - 1], grid[k], parity, ya, yb);
                const std::vector<double> a = phase1(root, parity, ya), b = phase1(root, parity, yb);
                double res = hecke_residual(a);
                for (int n = 2; n <= 6; ++n) res = std::max(res, std::abs(a[n] - b[n]));
                if (res >= 1e-8) continue;
                auto same = std::find_if(found.begin(), found.end(), [&](const Found& f) {
                    return f.parity == parity && std::abs(f.r - root) < 1e-6;
                });
                if (same != found.end()) {
                    if (res < same->residual) *same = {root, parity, a, res};
                    continue;
                }
                found.push_back({root, parity, a, res});
                std::fprintf(stderr, "%s r=%.12f residual %.2e (Y=%.3f,%.3f)\n", pi == 0 ? "even" : "odd", root, res, ya, yb);
            }
        }
    }
    std::sort(found.begin(), found.end(), [](const Found& x, const Found& y) { return x.r < y.r; });

    FILE* f = std::fopen(out.c_str(), "w");
    if (!f) {
        std::perror(out.c_str());
        return 1;
    }
    std::fprintf(f, "t,parity,n,lambda\n");
    bool extended[2] = {false, false};
    for (const Found& fm : found) {
        const int pi = fm.parity == Parity::even ? 0 : 1;
        std::vector<double> lam;
        if (!extended[pi]) {
            extended[pi] = true;
            lam = phase2(fm.r, fm.parity, fm.c, N, 1.0);
            const std::vector<double> check = phase2(fm.r, fm.parity, fm.c, N, 0.93);
            double diff = 0.0, hecke = 0.0;
            for (int n = 1; n <= N; ++n) diff = std::max(diff, std::abs(lam[n] - check[n]));
            for (int n = 2; n * n <= N; ++n)
                for (int m = n + 1; n * m <= N; ++m)
                    if (std::gcd(n, m) == 1) hecke = std::max(hecke, std::abs(lam[n] * lam[m] - lam[n * m]));
            std::fprintf(stderr, "extended r=%.12f to n=%d: height-shift diff %.2e, coprime Hecke residual %.2e\n", fm.r, N,
                         diff, hecke);
        } else {
            lam.assign(fm.c.begin(), fm.c.begin() + n_small + 1);
        }
        const char* par = fm.parity == Parity::even ? "even" : "odd";
        std::fprintf(f, "%.12f,%s,0,%.12f\n", fm.r, par, sym2_L1(fm.r, fm.parity, fm.c));
        for (std::size_t n = 1; n < lam.size(); ++n) std::fprintf(f, "%.12f,%s,%zu,%.12e\n", fm.r, par, n, lam[n]);
    }
    std::fclose(f);
    std::fprintf(stderr, "%zu forms written to %s\n", found.size(), out.c_str());
    return 0;
}
