#include "eisenlab/spectral.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "eisenlab/arith.hpp"
#include "eisenlab/moments.hpp"
#include "eisenlab/quadrature.hpp"

namespace eisenlab {

namespace {

const double kLogPi = std::log(kPi);

double log_cosh_real(double a) {
    a = std::abs(a);
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

// GL nodes and weights on [a, b] split into panels of width <= width.
void panel_nodes(double a, double b, double width, int order, std::vector<double>& x, std::vector<double>& w) {
    x.clear();
    w.clear();
    if (!(b > a)) return;
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
    for (int p = 0; p < panels; ++p) append_gauss(order, a + (b - a) * p / panels, a + (b - a) * (p + 1) / panels, x, w);
}

// int_a^b f at orders 32 and 16 on the same panels; f is evaluated in parallel, summed in a fixed order.
template <class F>
Integral gl_pair(F f, double a, double b, double width) {
    Integral r;
    std::vector<double> x, w;
    double v[2] = {0.0, 0.0};
    const int orders[2] = {32, 16};
    for (int k = 0; k < 2; ++k) {
        panel_nodes(a, b, width, orders[k], x, w);
        std::vector<double> terms(x.size());
#pragma omp parallel for schedule(dynamic, 8)
        for (std::size_t i = 0; i < x.size(); ++i) terms[i] = w[i] * f(x[i]);
        v[k] = pairwise_sum(terms.data(), terms.size());
    }
    r.value = v[0];
    r.est_error = std::abs(v[0] - v[1]);
    return r;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class V>
bool parse_number(const std::string& s, V& out) {
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

// ---- Maass form data -------------------------------------------------------------------------

HeckeAudit hecke_audit(const MaassForm& form) {
    HeckeAudit a;
    const long long N = form.n_max();
    for (long long n = 2; n * n <= N; ++n) {
        if (!form.has(n)) continue;
        for (long long m = n; n * m <= N; ++m) {
            if (!form.has(m)) continue;
            bool complete = true;
            for (long long k : default_divisors().divisors(gcd_ll(n, m)))
                if (!form.has(n * m / (k * k))) complete = false;
            if (!complete) continue;
            const double r = hecke_relation_check(form, n, m);
            ++a.pairs;
            if (r > a.max_residual) {
                a.max_residual = r;
                a.n = n;
                a.m = m;
            }
        }
    }
    return a;
}

std::vector<MaassForm> ingest_forms(std::istream& in, const IngestOptions& opt) {
    struct Pending {
        double t = 0.0;
        Parity parity = Parity::even;
        std::map<long long, double> lambda;
        std::optional<double> sym2;
    };
    std::map<std::pair<double, int>, Pending> forms;
    std::string line;
    long long line_no = 0;
    bool header = false;
    auto fail = [&](const std::string& why) {
        throw ValidationError("ingest_forms: line " + std::to_string(line_no) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(trim(cell));
        if (!header) {
            if (f != std::vector<std::string>{"t", "parity", "n", "lambda"}) fail("expected header t,parity,n,lambda");
            header = true;
            continue;
        }
        if (f.size() != 4) fail("expected 4 fields");
        double t = 0.0, value = 0.0;
        long long n = 0;
        if (!parse_number(f[0], t) || !(t > 0.0)) fail("t must be a positive number");
        if (f[1] != "even" && f[1] != "odd") fail("parity must be even or odd");
        if (!parse_number(f[2], n) || n < 0) fail("n must be a nonnegative integer");
        if (!parse_number(f[3], value) || !std::isfinite(value)) fail("value must be a finite number");
        const Parity parity = f[1] == "even" ? Parity::even : Parity::odd;
        Pending& p = forms[{t, static_cast<int>(parity)}];
        p.t = t;
        p.parity = parity;
        const std::string label = "t=" + f[0] + " " + f[1];
        if (n == 0) {
            if (!(value > 0.0)) fail("L(1, sym^2) must be positive");
            if (p.sym2) warn("ingest_forms: duplicate sym2L1 for " + label + " at line " + std::to_string(line_no) + "; keeping the last");
            p.sym2 = value;
        } else {
            if (p.lambda.count(n))
                warn("ingest_forms: duplicate n=" + std::to_string(n) + " for " + label + " at line " + std::to_string(line_no) + "; keeping the last");
            p.lambda[n] = value;
        }
    }
    if (!header) throw ValidationError("ingest_forms: empty input");

    std::vector<MaassForm> out;
    for (auto& [key, p] : forms) {
        MaassForm form;
        form.t = p.t;
        form.parity = p.parity;
        form.sym2_L1 = p.sym2;
        const std::string label = "form t=" + std::to_string(p.t) + (p.parity == Parity::even ? " even" : " odd");
        if (p.lambda.empty()) throw ValidationError("ingest_forms: " + label + " has no eigenvalues");
        form.lambda.assign(p.lambda.rbegin()->first + 1, std::numeric_limits<double>::quiet_NaN());
        for (auto [n, v] : p.lambda) form.lambda[n] = v;
        if (!form.has(1) || std::abs(form.lambda[1] - 1.0) > 1e-12) throw ValidationError("ingest_forms: " + label + " needs lambda(1) = 1");
        const HeckeAudit a = hecke_audit(form);
        if (a.max_residual > opt.reject_above) {
            std::ostringstream msg;
            msg << "ingest_forms: " << label << " fails the Hecke relation at (n,m)=(" << a.n << "," << a.m
                << "), residual " << a.max_residual;
            throw ValidationError(msg.str());
        }
        if (a.max_residual > opt.warn_above) {
            std::ostringstream msg;
            msg << "ingest_forms: " << label << " Hecke residual " << a.max_residual << " at (" << a.n << "," << a.m << ")";
            warn(msg.str());
        }
        out.push_back(std::move(form));
    }
    return out;
}

std::vector<MaassForm> ingest_forms_file(const std::string& path, const IngestOptions& opt) {
    std::ifstream in(path);
    if (!in) throw ValidationError("ingest_forms: cannot open " + path);
    return ingest_forms(in, opt);
}

// ---- Test functions ----------------------------------------------------------------------------

double TestFunction::operator()(double t) const {
    if (kind == Kind::custom) return custom(t);
    if (center == 0.0) return std::exp(-(t / width) * (t / width));
    const double a = (t - center) / width, b = (t + center) / width;
    return std::exp(-a * a) + std::exp(-b * b);
}

double TestFunction::cutoff() const {
    if (kind == Kind::custom) return custom_cutoff;
    return center + width * std::sqrt(std::log(1e16) + std::log(2.0));
}

void TestFunction::validate() const {
    if (kind == Kind::gaussian) {
        if (!(width > 0.0) || !(center >= 0.0)) throw ValidationError("TestFunction: need width > 0 and center >= 0");
        return;
    }
    if (!custom) throw ValidationError("TestFunction: custom kind without a function");
    if (!(custom_cutoff > 0.0)) throw ValidationError("TestFunction: custom kind needs a positive cutoff");
    double peak = 0.0;
    for (int k = 0; k <= 64; ++k) peak = std::max(peak, std::abs(custom(custom_cutoff * k / 64.0)));
    if (!(peak > 0.0) || !std::isfinite(peak)) throw ValidationError("TestFunction: custom function vanishes or is not finite");
    for (int k = 1; k <= 64; ++k) {
        const double t = custom_cutoff * k / 64.0;
        if (std::abs(custom(t) - custom(-t)) > 1e-12 * peak) throw ValidationError("TestFunction: custom function is not even");
    }
    // Beyond the cutoff the function must sit under the (1+|t|)^{-2} envelope anchored at its peak.
    for (double t : {1.0, 2.0, 4.0, 8.0})
        if (std::abs(custom(t * custom_cutoff)) * std::pow(1.0 + t * custom_cutoff, 2.0) > peak)
            throw ValidationError("TestFunction: custom function decays too slowly");
}

// ---- Approximate functional equation -----------------------------------------------------------

AfeResult afe_pair(const MaassForm& form, double T, const WeightContour& contour) {
    contour.validate();
    if (!(T >= 0.0)) throw DomainError("afe_pair: T must be nonnegative");
    const long long N = form.n_max();
    if (std::pow(std::max(T, 1.0), 2.05) > static_cast<double>(N))
        throw DomainError("afe_pair: needs lambda(n) up to T^{2.05}, have " + std::to_string(N));
    for (long long n = 1; n <= N; ++n)
        if (!form.has(n)) throw DomainError("afe_pair: missing lambda(" + std::to_string(n) + ")");

    WeightContour c = contour;
    if (c.height == 0.0) c.height = 10.0;
    if (c.step == 0.0) c.step = 0.5;
    const ContourKernel kp = kernel_V_pm(form.t, T, Sign::plus, form.parity, static_cast<double>(N), c);
    const ContourKernel km = kernel_V_pm(form.t, T, Sign::minus, form.parity, static_cast<double>(N), c);
    std::vector<ContourIntegral> vp(N + 1), vm(N + 1);
#pragma omp parallel for schedule(dynamic, 64)
    for (long long x = 1; x <= N; ++x) {
        vp[x] = kp.eval(static_cast<double>(x));
        vm[x] = km.eval(static_cast<double>(x));
    }

    AfeResult r;
    r.x_max = N;
    std::vector<double> re_p, im_p, re_m, im_m;
    double abs_sum = 0.0, qerr = 0.0;
    for (long long n = 1; n <= N; ++n) {
        const double a = form.at(n) * tau_gen(n, T);
        if (a == 0.0) continue;
        const double ln = std::log(static_cast<double>(n));
        for (long long k = 1; k * k * n <= N; ++k) {
            const long long x = k * k * n;
            const double lk = std::log(static_cast<double>(k));
            const double mag = a * std::exp(-0.5 * ln - lk);
            const double ph = T * ln + 2.0 * T * lk;
            const cplx tp = mag * std::polar(1.0, ph) * vp[x].value;
            const cplx tm = mag * std::polar(1.0, -ph) * vm[x].value;
            re_p.push_back(tp.real());
            im_p.push_back(tp.imag());
            re_m.push_back(tm.real());
            im_m.push_back(tm.imag());
            abs_sum += std::abs(mag);
            qerr += std::abs(mag) * (vp[x].error + vm[x].error + vp[x].tail + vm[x].tail);
        }
    }
    r.plus = {pairwise_sum(re_p.data(), re_p.size()), pairwise_sum(im_p.data(), im_p.size())};
    r.minus = {pairwise_sum(re_m.data(), re_m.size()), pairwise_sum(im_m.data(), im_m.size())};
    r.value = r.plus + r.minus;
    r.tail = std::max(std::abs(vp[N].value), std::abs(vm[N].value)) * abs_sum;
    r.quadrature_error = qerr;
    return r;
}

// ---- Triple product ----------------------------------------------------------------------------

PairingResult rankin_selberg_pairing(const MaassForm& form, double T, GammaPath path, const WeightContour& contour) {
    PairingResult r;
    if (form.parity == Parity::odd) return r;  // the triple product vanishes: L(1/2, u) = 0
    if (!form.sym2_L1) throw ValidationError("rankin_selberg_pairing: form lacks L(1, sym^2)");
    const double t = form.t;
    r.rho1 = std::exp(0.5 * (std::log(2.0) + log_cosh_real(kPi * t) - std::log(*form.sym2_L1)));

    // log Gamma(z + i y), exact or leading Stirling where the expansion is valid.
    auto lgam = [&](double z, double y) -> cplx {
        if (path == GammaPath::stirling && std::abs(y) > 2.0 * (z + 1.0) * (z + 1.0)) {
            ++r.stirling_factors;
            const cplx lead = stirling_log_gamma(z, y, StirlingOrder{0});
            r.stirling_error += std::abs(stirling_log_gamma(z, y, StirlingOrder{4}) - lead);
            return lead;
        }
        return log_gamma(cplx(z, y));
    };
    auto log_gamma_factor = [&](cplx s) {
        return -s * kLogPi + lgam(0.5 * s.real(), 0.5 * (s.imag() + t)) + lgam(0.5 * s.real(), 0.5 * (s.imag() - t));
    };
    const AfeResult afe = afe_pair(form, T, contour);
    const cplx L = std::conj(afe.value);
    if (L == 0.0) {
        r.log_value = {-std::numeric_limits<double>::infinity(), 0.0};
        return r;
    }
    const LogPolar x = xi(cplx(1.0, 2.0 * T));
    const cplx lx(x.log_mod, x.phase);
    const cplx lv = std::log(r.rho1 / 2.0) + log_gamma_factor(0.5) + log_gamma_factor(cplx(0.5, 2.0 * T)) + std::log(L) - 2.0 * lx;
    r.log_value = LogPolar::from_log(lv);
    r.value = r.log_value.to_complex();
    return r;
}

// ---- Kuznetsov ---------------------------------------------------------------------------------

KuznetsovReport kuznetsov_two_sides(long long n, long long m, const TestFunction& phi, const std::vector<MaassForm>& forms,
                                    int c_max) {
    if (n < 1 || m < 1) throw DomainError("kuznetsov_two_sides: n, m must be positive");
    if (c_max < 4) throw DomainError("kuznetsov_two_sides: c_max must be at least 4");
    phi.validate();
    KuznetsovReport r;
    r.n = n;
    r.m = m;
    r.c_max = c_max;
    const double cut = phi.cutoff();

    std::vector<double> disc;
    for (const MaassForm& f : forms) {
        if (!f.sym2_L1) throw ValidationError("kuznetsov_two_sides: form without L(1, sym^2)");
        disc.push_back(f.at(n) * f.at(m) * phi(f.t) / *f.sym2_L1);
        r.t_cover = std::max(r.t_cover, f.t);
    }
    r.discrete = pairwise_sum(disc.data(), disc.size());

    const double dd = default_divisors().count(n) * default_divisors().count(m);
    if (r.t_cover < cut) {
        const Integral tail = gl_pair([&](double t) { return std::abs(phi(t)) * t; }, r.t_cover, cut, 1.0);
        r.basis_tail = dd * tail.value / (kPi * kPi);
    }

    // Integrands are even in t; fold to [0, cut].
    const Integral cont = gl_pair(
        [&](double t) {
            const cplx z = zeta(cplx(1.0, 2.0 * t));
            return tau_gen(n, t) * tau_gen(m, t) / std::norm(z) * phi(t);
        },
        0.0, cut, 1.0);
    r.continuous = cont.value / kPi;
    r.spectral = r.discrete + r.continuous;

    if (n == m) {
        auto f = [&](double t) { return phi(t) * t * std::tanh(kPi * t); };
        const Integral d1 = gl_pair(f, 0.0, cut, 1.0), d2 = gl_pair(f, 0.0, cut, 0.5);
        r.delta = d2.value / (kPi * kPi);
        r.delta_resolution_gap = std::abs(d1.value - d2.value) / (kPi * kPi);
    }

    // (1/2pi) int J(x,t) phi d*t = (1/2pi) int_0^inf -4 Im[J_{2it}(4 pi x)/cosh(pi t)] t phi(t) dt.
    const double rt = std::sqrt(static_cast<double>(n) * static_cast<double>(m));
    std::vector<double> transform(c_max + 1, 0.0), terr(c_max + 1, 0.0);
    for (int c = 1; c <= c_max; ++c) {
        const double x = rt / c;
        const Integral I = gl_pair(
            [&](double t) { return -4.0 * bessel_j_imag_over_cosh(4.0 * kPi * x, t).imag() * t * phi(t); }, 0.0, cut, 1.0);
        transform[c] = I.value / kTwoPi;
        terr[c] = I.est_error / kTwoPi;
    }
    std::vector<double> terms(c_max);
    for (int c = 1; c <= c_max; ++c) {
        terms[c - 1] = kloosterman(n, m, c) / c * transform[c];
        r.quadrature_error += std::abs(kloosterman(n, m, c)) / c * terr[c];
        if (c >= c_max / 4) r.K_slope = std::max(r.K_slope, std::abs(transform[c]) / (rt / c));
    }
    const double g = std::sqrt(static_cast<double>(gcd_ll(n, m)));
    for (int C : {c_max / 4, c_max / 2, c_max}) {
        KloostermanPartial p;
        p.c_max = C;
        p.sum = pairwise_sum(terms.data(), C);
        // sum_{c > C} d(c) sqrt(gcd) sqrt(c)/c * K sqrt(nm)/c ~ K sqrt(nm) sqrt(gcd) 2 C^{-1/2} (log C + 2 gamma + 2)
        p.tail_estimate = r.K_slope * rt * g * 2.0 / std::sqrt(C) * (std::log(C) + 2.0 * kEulerGamma + 2.0);
        r.partials.push_back(p);
    }
    r.kloosterman = r.partials.back().sum;
    r.geometric = r.delta + r.kloosterman;
    r.quadrature_error += cont.est_error / kPi;
    r.closure = std::abs(r.spectral - r.geometric);
    r.closure_bound = r.basis_tail + r.partials.back().tail_estimate + r.quadrature_error;
    r.relative = r.closure / std::max(std::abs(r.geometric), 1e-300);
    r.attribution = r.basis_tail >= r.partials.back().tail_estimate ? "basis truncation" : "c truncation";
    return r;
}

// ---- J-Bessel transform ------------------------------------------------------------------------

BesselTransformCheck bessel_transform_check(double x, double T, double alpha, double z_scale) {
    if (!(x > 0.0) || !(T > 1.0)) throw DomainError("bessel_transform_check: need x > 0 and T > 1");
    if (!(alpha > 0.0 && alpha < 0.01)) throw DomainError("bessel_transform_check: alpha must lie in (0, 1/100)");
    const double lo = std::pow(T, -2.0 * alpha), hi = std::pow(T, 2.0 * alpha);
    BesselTransformCheck r;
    cplx direct[2];
    cplx main_int = 0.0;
    double abs_int = 0.0;
    const int panels[2] = {8, 16};
    for (int k = 0; k < 2; ++k) {
        std::vector<double> u, w;
        for (int p = 0; p < panels[k]; ++p) append_gauss(32, lo + (hi - lo) * p / panels[k], lo + (hi - lo) * (p + 1) / panels[k], u, w);
        std::vector<cplx> terms(u.size());
#pragma omp parallel for schedule(dynamic, 8)
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double t = u[i] * T;
            const double Z = z_scale * window_Z(u[i], T, alpha);
            // t and -t together; dt = T du.
            const cplx j = bessel_j_imag_over_cosh(kTwoPi * x, t) - bessel_j_imag_over_cosh(kTwoPi * x, -t);
            terms[i] = w[i] * T * j * Z * t;
        }
        cplx acc = 0.0;
        for (const cplx& v : terms) acc += v;
        direct[k] = acc;
        if (k == 1) {
            for (std::size_t i = 0; i < u.size(); ++i) {
                const double Z = z_scale * window_Z(u[i], T, alpha);
                main_int += w[i] * u[i] * Z * e_of(-u[i] * u[i] * T * T / (2.0 * kPi * kPi * x));
                abs_int += w[i] * u[i] * std::abs(Z);
            }
        }
    }
    r.direct = direct[1];
    r.quadrature_error = std::abs(direct[1] - direct[0]);
    r.main = cplx(0.0, -std::sqrt(2.0) / kPi) * (T * T / std::sqrt(x)) * (cplx(1.0, 1.0) * e_of(x) * main_int).real();
    r.difference = std::abs(r.direct - r.main);
    r.envelope = x / std::pow(T, 3.0 - 24.0 * alpha);
    r.fitted_C = r.difference / r.envelope;
    r.scale = 2.0 * T * T * abs_int;
    return r;
}

// ---- Diagonal terms ----------------------------------------------------------------------------

DiagonalTerms diagonal_main_terms(double T, const Bump& bump) {
    if (!(T >= 10.0)) throw DomainError("diagonal_main_terms: requires T >= 10");
    DiagonalTerms d;
    const double h0 = bump.hhat0();
    const double L2 = std::log(T) * std::log(T);
    const cplx zp = zeta(cplx(1.0, 2.0 * T)), zm = std::conj(zp);
    const double k12 = 12.0 / (kPi * kPi);
    d.D_pp = h0 * k12 * zp * zm * zm * L2;
    // pi^{-4iT} e^{-2iT} T^{2iT}
    const cplx twist = std::polar(1.0, wrap_phase(-4.0 * T * kLogPi - 2.0 * T + 2.0 * T * std::log(T)));
    d.D_mm = h0 * twist * k12 * zp * zp * zm * L2;
    const cplx c = scattering(T).c;
    d.total = kPi / (zm * zm * zp) * (d.D_pp + c * std::polar(1.0, wrap_phase(2.0 * T * kLogPi)) * d.D_mm);
    const double turn = -2.0 * T + 2.0 * T * std::log(T);
    d.bracket = 1.0 + std::exp(log_gamma(cplx(0.5, -T)) - log_gamma(cplx(0.5, T)) + cplx(0.0, turn));
    d.bracket_stirling =
        1.0 + std::exp(stirling_log_gamma(0.5, -T, StirlingOrder{4}) - stirling_log_gamma(0.5, T, StirlingOrder{4}) + cplx(0.0, turn));
    d.prediction = h0 * 24.0 / kPi * L2;
    d.deviation = std::abs(d.total / d.prediction - 1.0);
    return d;
}

double arcsine_mass(double T) {
    if (!(T > 0.0)) throw DomainError("arcsine_mass: T must be positive");
    boost::math::quadrature::tanh_sinh<double> ts;
    const double b = 2.0 * T;
    // xc is the signed distance to the nearer endpoint, which keeps 2T - t exact near the singularity.
    auto f = [b](double t, double xc) {
        const double gap = xc > 0.0 ? xc : b - t;
        return 1.0 / std::sqrt(gap * (b + t));
    };
    return ts.integrate(f, 0.0, b);
}

// ---- Constant bookkeeping ----------------------------------------------------------------------

PredictionLedger prediction_ledger(double T, const Bump& bump, Rational cross_coefficient) {
    if (!(T > 1.0)) throw DomainError("prediction_ledger: T must exceed 1");
    PredictionLedger L;
    L.hhat0 = bump.hhat0();
    const double unit = L.hhat0 * std::log(T) * std::log(T) / kPi;
    L.rows = {
        {"constant projection (3/pi)|<E_A^2,1>|^2", "12/pi", Rational(12), 0.0},
        {"discrete sum_j |<E^2,u_j>|^2", "48/pi", Rational(48), 0.0},
        {"continuous projection of E^2", "o(log^2 T)", Rational(0), 0.0},
        {"<H_A,H_A>", "24/pi", Rational(24), 0.0},
        {"cross term -2 Re Xi", "-2 x 24/pi", Rational(-2) * cross_coefficient, 0.0},
        {"continuous projection of H_A", "o(log^2 T)", Rational(0), 0.0},
    };
    for (LedgerRow& row : L.rows) {
        row.value = boost::rational_cast<double>(row.coefficient) * unit;
        L.total += row.coefficient;
    }
    L.combines_to_36 = L.total == Rational(36);
    L.prediction = 36.0 * unit;
    return L;
}

}  // namespace eisenlab
