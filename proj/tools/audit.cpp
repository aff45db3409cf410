#include "audit.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <random>

#include "eisenlab/moments.hpp"
#include "eisenlab/spectral.hpp"
#include "eisenlab/weights.hpp"

namespace eisenlab::cli {

namespace {

double q_of(double t, double T) { return std::abs(t) * std::sqrt(4.0 * T * T - t * t); }

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

AuditRow row(std::string check, std::string params, double value, double threshold) {
    return {std::move(check), std::move(params), value, threshold, value <= threshold};
}

// The weights suite keeps one constant per check; every entry is compared with "<=".
constexpr double kContourTol = 1e-7;
constexpr double kVanishTol = 1e-10;
constexpr double kFitMax = 100.0;
constexpr double kHalving = 0.55;  // error ratio T=200 over T=100 for an O(1/T) approach

std::string join_failures(const std::vector<AuditRow>& rows) {
    std::string s;
    for (const AuditRow& r : rows)
        if (!r.pass) s += (s.empty() ? "" : ", ") + r.check;
    return s;
}

}  // namespace

std::vector<AuditRow> weights_audit(double alpha) {
    std::vector<AuditRow> rows;
    const double T = 50.0, t = 60.0;
    const Bump b = Bump::make(2.0, alpha, T);

    WeightContour c1, c2;
    c2.sigma = 2.0;
    double worst = 0.0;
    for (Sign sg : {Sign::plus, Sign::minus})
        for (Parity par : {Parity::even, Parity::odd})
            worst = std::max(worst, rel(weight_V_pm(100, t, T, sg, par, c1).value, weight_V_pm(100, t, T, sg, par, c2).value));
    rows.push_back(row("contour_shift_V", "x=100 t=60 T=50 sigma=1,2", worst, kContourTol));

    WeightContour lo, hi;
    lo.sigma = 0.5;
    hi.sigma = 1.5;
    worst = 0.0;
    double vcal_far = 0.0;
    for (Sign sg : {Sign::plus, Sign::minus}) {
        const cplx base = weight_Vcal_pm(1.0, t, T, b, sg, lo).value;
        worst = std::max(worst, rel(weight_Vcal_pm(1.0, t, T, b, sg, hi).value, base));
        vcal_far = std::max(vcal_far, std::abs(weight_Vcal_pm(std::pow(T, 1.2), t, T, b, sg, hi).value) / std::abs(base));
    }
    rows.push_back(row("contour_shift_Vcal", "x=1 t=60 T=50 sigma=0.5,1.5", worst, kContourTol));

    rows.push_back(row("support_W_outside", "t=T^{1-alpha}/2, T=50", window_W(0.5 * std::pow(T, 1.0 - alpha), T, alpha), kVanishTol));
    rows.push_back(row("support_W_inside", "|W(T) - 1|, T=50", std::abs(window_W(T, T, alpha) - 1.0), kVanishTol));
    const double y_cap = 2.0 * std::pow(T, alpha);
    rows.push_back(row("support_htilde", "|h~(1-s)|/h^(0) at |Im s| = 2T^alpha, T=50",
                       std::abs(bump_transform(cplx(0.99, -y_cap), b)) / b.hhat0(), kVanishTol));
    const double v1 = std::abs(weight_V_pm(1.0, t, T, Sign::plus, Parity::even).value);
    rows.push_back(row("support_V", "|V+(T^2.2)|/|V+(1)|, t=60 T=50",
                       std::abs(weight_V_pm(std::pow(T, 2.2), t, T, Sign::plus, Parity::even).value) / v1, kVanishTol));
    rows.push_back(row("support_Vcal", "|Vcal(T^1.2)|/|Vcal(1)|, t=60 T=50", vcal_far, kVanishTol));

    double fit_H = 0.0;
    for (double TT : {20.0, 50.0, 100.0}) fit_H = std::max(fit_H, std::norm(std::exp(log_weight_Hcal(TT, TT))) * q_of(TT, TT));
    rows.push_back(row("envelope_H", "|H(T)|^2 q, T=20,50,100", fit_H, kFitMax));
    double fit_Hs = 0.0;
    for (double u = 0.2; u < 1.85; u += 0.15) {
        const double tt = u * T, q = q_of(tt, T);
        for (Sign sg : {Sign::plus, Sign::minus})
            fit_Hs = std::max(fit_Hs, std::norm(weight_Hcal_pm(0.5, tt, T, b, sg)) * q / std::pow(q / (4 * T), 0.5));
    }
    rows.push_back(row("envelope_Hs", "sigma=1/2 over bulk t, T=50", fit_Hs, kFitMax));
    double fit_V = 0.0;
    for (double lx = 0.0; lx < 16.0; lx += 1.0) {
        const double x = std::exp(lx);
        for (Sign sg : {Sign::plus, Sign::minus})
            fit_V = std::max(fit_V, std::abs(weight_V_pm(x, t, T, sg, Parity::even).value) * x / q_of(t, T));
    }
    rows.push_back(row("envelope_V", "sigma=1 over x=e^0..e^15, t=60 T=50", fit_V, kFitMax));

    auto dev = [&](double TT, bool minus) {
        const Bump bb = Bump::make(2.0, alpha, TT);
        const LeadingTerms L = leading_terms(0.0, TT, TT, bb);
        const cplx hh = std::exp(log_weight_Hcal(TT, TT)) * weight_Hcal_pm(0.0, TT, TT, bb, minus ? Sign::minus : Sign::plus);
        return minus ? std::abs(hh * Vminus_exact(TT, TT) / L.HH_minus - 1.0) : std::abs(hh / L.HH_plus - 1.0);
    };
    for (bool minus : {false, true})
        rows.push_back(row(minus ? "stirling_halving_Hminus" : "stirling_halving_Hplus", "error(T=200)/error(T=100), s=0, t=T",
                           dev(200.0, minus) / dev(100.0, minus), kHalving));
    return rows;
}

bool in_quick_subset(int id) { return id != 4 && id != 8 && id != 5; }

CriterionResult run_criterion(int id, const AcceptanceOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    r.id = id;
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
    switch (id) {
        case 1: {
            r.name = "Maass-Selberg identity, quadrature vs closed form";
            constexpr double tol = 1e-5, budget = 300.0;
            double worst = 0.0;
            for (auto [T, A] : {std::pair{5.0, 1.5}, {10.0, 2.0}, {20.0, 2.0}}) {
                SpectralSetup s;
                s.T = T;
                s.A = A;
                const MomentSet m = moment_set(s, 1e-9);
                worst = std::max(worst, rel(m.second_integral, m.second_closed_form));
            }
            r.pass = worst <= tol && elapsed() <= budget;
            r.detail = fmt::format("max rel err {:.2e} (tol {:.0e})", worst, tol);
            break;
        }
        case 2: {
            r.name = "generic Maass-Selberg at s1=2, s2=3, A=2";
            constexpr double tol = 1e-6, budget = 60.0;
            const double e = rel(maass_selberg_quadrature(2.0, 3.0, 2.0).value, maass_selberg(2.0, 3.0, 2.0));
            r.pass = e <= tol && elapsed() <= budget;
            r.detail = fmt::format("rel err {:.2e} (tol {:.0e})", e, tol);
            break;
        }
        case 3: {
            r.name = "second-moment trend toward 2 phi log T";
            constexpr double band = 0.15;
            auto dev = [](double T) { return std::abs(maass_selberg_limit(T, 2.0) / (2.0 * scattering_phi(cplx(0.5, T)) * std::log(T)) - 1.0); };
            const double d20 = dev(20.0), d200 = dev(200.0);
            r.pass = d200 <= band && d200 < d20;
            r.detail = fmt::format("|ratio-1| = {:.4f} at T=20, {:.4f} at T=200 (band {})", d20, d200, band);
            break;
        }
        case 4: {
            r.name = "fourth-moment sweep T in {10,25,50}, A in {1.5,2,3}";
            constexpr double tol2 = 1e-4, budget = 1800.0;
            double worst2 = 0.0, spread[3] = {0, 0, 0};
            bool finite = true;
            int k = 0;
            for (double T : {10.0, 25.0, 50.0}) {
                SpectralSetup s;
                s.T = T;
                const auto sets = moment_sweep(s, {1.5, 2.0, 3.0});
                double lo = 1e300, hi = -1e300;
                for (const MomentSet& m : sets) {
                    worst2 = std::max(worst2, rel(m.second_integral, maass_selberg_limit(T, m.fourth.A)));
                    finite = finite && std::isfinite(m.fourth.ratio) && m.fourth.ratio > 0.0;
                    lo = std::min(lo, m.fourth.ratio);
                    hi = std::max(hi, m.fourth.ratio);
                }
                spread[k++] = hi - lo;
            }
            r.pass = worst2 <= tol2 && finite && spread[2] < spread[0] && elapsed() <= budget;
            r.detail = fmt::format("p=2 max rel err {:.2e}; ratio spread {:.3f} / {:.3f} / {:.3f} at T=10/25/50", worst2, spread[0],
                                   spread[1], spread[2]);
            break;
        }
        case 5: {
            r.name = "weight-function suite";
            const auto rows = weights_audit(opt.alpha);
            int passed = 0;
            for (const AuditRow& a : rows) passed += a.pass;
            r.pass = passed == static_cast<int>(rows.size()) && elapsed() <= 600.0;
            r.detail = fmt::format("{}/{} checks pass", passed, rows.size());
            if (!r.pass) r.detail += "; failing: " + join_failures(rows);
            break;
        }
        case 6: {
            r.name = "Mellin pair g/G and Mellin-Barnes";
            const double eg = rel(mellin_g_transform_quadrature(1.0, 5.0, 3.0), mellin_G(1.0, 5.0, 3.0));
            const double emb = rel(mellin_barnes_KK_quadrature(1.5, 3.0, 5.0), mellin_barnes_KK(1.5, 3.0, 5.0));
            r.pass = eg <= 1e-6 && emb <= 1e-8;
            r.detail = fmt::format("g/G rel err {:.2e} (tol 1e-6), Mellin-Barnes {:.2e} (tol 1e-8)", eg, emb);
            break;
        }
        case 7: {
            r.name = "diagonal bracket factor and the 36 ledger";
            const double e100 = std::abs(diagonal_main_terms(100.0, Bump::make(2.0, opt.alpha, 100.0)).bracket - 2.0);
            const double e400 = std::abs(diagonal_main_terms(400.0, Bump::make(2.0, opt.alpha, 400.0)).bracket - 2.0);
            const PredictionLedger L = prediction_ledger(100.0, Bump::make(2.0, opt.alpha, 100.0));
            r.pass = e100 <= 10.0 / 100.0 && e400 <= 10.0 / 400.0 && L.combines_to_36;
            r.detail = fmt::format("|bracket-2| = {:.2e} (T=100), {:.2e} (T=400); ledger total {}/{}", e100, e400,
                                   L.total.numerator(), L.total.denominator());
            break;
        }
        case 8: {
            r.name = "Kuznetsov n=m=1, Gaussian phi, c_max 50/100/200";
            const auto forms = ingest_forms_file(opt.forms_path);
            const KuznetsovReport k = kuznetsov_two_sides(1, 1, TestFunction{}, forms, 200);
            bool monotone = true;
            for (std::size_t i = 1; i < k.partials.size(); ++i)
                monotone = monotone && k.partials[i].tail_estimate <= k.partials[i - 1].tail_estimate;
            r.pass = monotone && k.spectral * k.geometric > 0.0 && k.closure <= k.closure_bound && elapsed() <= 300.0;
            r.detail = fmt::format("spectral {:.9f}, geometric {:.9f}, closure {:.2e} <= bound {:.2e} ({}); tails {:.2e}/{:.2e}/{:.2e}",
                                   k.spectral, k.geometric, k.closure, k.closure_bound, k.attribution, k.partials[0].tail_estimate,
                                   k.partials[1].tail_estimate, k.partials[2].tail_estimate);
            break;
        }
        case 9: {
            r.name = "J-Bessel transform check at T=40";
            constexpr double T = 40.0, Cmax = 100.0, small = 1e-8;
            const BesselTransformCheck big = bessel_transform_check(T * T, T, opt.alpha);
            const BesselTransformCheck low = bessel_transform_check(T, T, opt.alpha);
            const double m_rel = std::abs(low.main) / low.scale, d_rel = std::abs(low.direct) / low.scale;
            r.pass = big.fitted_C < Cmax && m_rel < small && d_rel < small;
            r.detail = fmt::format("x=T^2: C = {:.2e} (< {}); x=T: |main|/scale {:.2e}, |direct|/scale {:.2e} (< {:.0e})", big.fitted_C,
                                   Cmax, m_rel, d_rel, small);
            break;
        }
        case 10: {
            r.name = "special-function substrate";
            std::mt19937_64 rng(20240611);
            std::uniform_real_distribution<double> re(-2.0, 3.0), im(-60.0, 60.0);
            double xi_worst = 0.0;
            for (int n = 0; n < 200;) {
                const cplx s(re(rng), im(rng));
                if (std::abs(s) < 0.05 || std::abs(s - 1.0) < 0.05) continue;
                const LogPolar a = xi(s), b = xi(1.0 - s);
                xi_worst = std::max({xi_worst, std::abs(a.log_mod - b.log_mod) / std::max(1.0, std::abs(a.log_mod)),
                                     std::abs(wrap_phase(a.phase - b.phase))});
                ++n;
            }
            double c_worst = 0.0;
            for (double T : {5.0, 17.3, 50.0, 200.0}) c_worst = std::max(c_worst, std::abs(std::abs(scattering(T).c) - 1.0));
            const double z2 = std::abs(zeta(2.0) - kPi * kPi / 6.0) / (kPi * kPi / 6.0);
            const double k01 = std::abs(bessel_k_real(0.0, 1.0) - 0.42102443824070833) / 0.42102443824070833;
            const cplx g100 = std::exp(log_gamma({0.5, 100.0}));
            const double e100 = std::abs(stirling_gamma(0.5, 100.0, {0}) / g100 - 1.0);
            const double e1000 = std::abs(std::exp(stirling_log_gamma(0.5, 1000.0, {0}) - log_gamma({0.5, 1000.0})) - 1.0);
            r.pass = xi_worst <= 1e-9 && c_worst <= 1e-12 && z2 <= 1e-9 && k01 <= 1e-9 && e100 / e1000 >= 8.0 && elapsed() <= 60.0;
            r.detail = fmt::format("xi sym {:.1e}, ||c|-1| {:.1e}, zeta(2) {:.1e}, K0(1) {:.1e}, Stirling err ratio T=100/1000 {:.1f}",
                                   xi_worst, c_worst, z2, k01, e100 / e1000);
            break;
        }
        default:
            throw std::out_of_range("run_criterion: criteria are numbered 1..10");
    }
    r.seconds = elapsed();
    return r;
}

}  // namespace eisenlab::cli
