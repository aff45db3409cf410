// eisenlab command-line front end: maass-selberg, moment-sweep, weights-audit, kuznetsov, acceptance.
#include <CLI11.hpp>
#include <fmt/format.h>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "audit.hpp"
#include "eisenlab/moments.hpp"
#include "eisenlab/spectral.hpp"

using namespace eisenlab;
using namespace eisenlab::cli;

namespace {

constexpr int kExitOk = 0, kExitFail = 1, kExitUsage = 2;

struct RunConfig {
    std::vector<double> T, A;
    double alpha = 0.009;
    double B = 2.0;
    double tol = 0.0;  // 0: the command's default
    int threads = 0;
    std::string out, plot, config;
    std::string forms = EISENLAB_DEFAULT_FORMS;
    bool quick = false;
    int c_max = 200;
    double width = 8.0;
    std::vector<std::string> pairs{"1:1", "1:2", "2:2", "1:3"};
    std::vector<int> expect_red;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ISO-8601 UTC; SOURCE_DATE_EPOCH pins it so that reruns are byte-identical.
std::string timestamp() {
    std::time_t now = std::time(nullptr);
    if (const char* e = std::getenv("SOURCE_DATE_EPOCH")) now = static_cast<std::time_t>(std::strtoll(e, nullptr, 10));
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

// Single writer: rows are appended in key order by the caller and flushed once.
class CsvEmitter {
public:
    CsvEmitter(const std::string& command, const std::vector<std::string>& header) {
        text_ << "# eisenlab " << command << " run " << timestamp() << "\n";
        row(header);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) text_ << (i ? "," : "") << csv_field(cells[i]);
        text_ << "\n";
    }
    void write(const std::string& path) const {
        if (path.empty()) {
            std::cout << text_.str();
            return;
        }
        std::ofstream f(path);
        if (!f) throw UsageError("cannot write " + path);
        f << text_.str();
    }

private:
    std::ostringstream text_;
};

// key = value lines; '#' starts a comment. Keys are the long flag names.
std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
            return s;
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError(fmt::format("{}:{}: expected key=value", path, line_no));
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

// Splices config entries in front of the command-line arguments, skipping keys the command line sets.
std::vector<std::string> merge_config(int argc, char** argv, const std::set<std::string>& commands) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config;
    std::set<std::string> given;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i].rfind("--", 0) != 0) continue;
        std::string key = args[i].substr(2);
        if (auto eq = key.find('='); eq != std::string::npos) {
            if (key.substr(0, eq) == "config") config = key.substr(eq + 1);
            key.erase(eq);
        } else if (key == "config" && i + 1 < args.size()) {
            config = args[i + 1];
        }
        given.insert(key);
    }
    if (config.empty()) return args;
    std::vector<std::string> extra;
    for (const auto& [k, v] : read_config(config)) {
        if (given.count(k)) continue;
        if (k == "quick") {
            if (v == "true" || v == "1") extra.push_back("--quick");
            continue;
        }
        extra.push_back("--" + k + "=" + v);
    }
    auto at = std::find_if(args.begin(), args.end(), [&](const std::string& a) { return commands.count(a) > 0; });
    if (at == args.end()) return args;
    args.insert(at + 1, extra.begin(), extra.end());
    return args;
}

void validate_grid(const RunConfig& c) {
    for (double T : c.T)
        for (double A : c.A) {
            SpectralSetup s;
            s.T = T;
            s.A = A;
            s.B = c.B;
            s.alpha = c.alpha;
            s.validate();
        }
}

std::vector<double> sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

int cmd_maass_selberg(RunConfig c) {
    if (c.A.empty()) throw UsageError("maass-selberg needs --A");
    if (c.T.empty()) c.T = {10.0};
    const double tol = c.tol > 0.0 ? c.tol : 1e-5;
    c.T = sorted(c.T);
    c.A = sorted(c.A);
    validate_grid(c);
    CsvEmitter csv("maass-selberg", {"T", "A", "closed", "quadrature", "rel_err", "closed_im", "quadrature_im"});
    bool ok = true;
    for (double T : c.T)
        for (double A : c.A) {
            SpectralSetup s;
            s.T = T;
            s.A = A;
            const MomentSet m = moment_set(s, 1e-9);
            const double e = std::abs(m.second_integral - m.second_closed_form) / std::abs(m.second_closed_form);
            ok = ok && e <= tol;
            csv.row({num(T), num(A), num(m.second_closed_form.real()), num(m.second_integral.real()), num(e),
                     num(m.second_closed_form.imag()), num(m.second_integral.imag())});
        }
    csv.write(c.out);
    if (!ok) std::cerr << "maass-selberg: rel_err above " << tol << "\n";
    return ok ? kExitOk : kExitFail;
}

void write_plot_script(const std::string& path, const std::string& data, const std::vector<double>& A) {
    std::ofstream f(path);
    if (!f) throw UsageError("cannot write " + path);
    std::string list;
    for (double a : A) list += (list.empty() ? "" : " ") + fmt::format("{}", a);
    f << "# gnuplot: fourth-moment ratio against log T, one curve per A\n"
      << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set xlabel 'log T'\n"
      << "set ylabel '||E_A||_4^4 / ((36/pi) log^2 T)'\n"
      << "plot for [a in \"" << list << "\"] '" << data
      << "' using (column(3) == 4 && abs(column(2) - (a + 0)) < 1e-9 ? log(column(1)) : 1/0):7 with linespoints title 'A='.a\n";
}

int cmd_moment_sweep(RunConfig c) {
    if (c.T.empty()) c.T = {10.0, 25.0, 50.0};
    if (c.A.empty()) c.A = {1.5, 2.0, 3.0};
    const double tol = c.tol > 0.0 ? c.tol : 1e-8;
    c.T = sorted(c.T);
    c.A = sorted(c.A);
    validate_grid(c);
    CsvEmitter csv("moment-sweep", {"T", "A", "p", "value", "err", "prediction", "ratio"});
    bool ok = true;
    for (double T : c.T) {
        SpectralSetup s;
        s.T = T;
        std::vector<MomentSet> sets;
        try {
            sets = moment_sweep(s, c.A, tol);
        } catch (const ConvergenceError& e) {
            std::cerr << "moment-sweep: T=" << T << ": " << e.what() << "\n";
            ok = false;
            continue;
        }
        for (const MomentSet& m : sets) {
            const double e2 = std::abs(m.second_integral - maass_selberg_limit(T, m.fourth.A)) / std::abs(m.second_closed_form);
            if (e2 > 1e-4 || !(m.fourth.ratio > 0.0) || !std::isfinite(m.fourth.ratio)) {
                std::cerr << fmt::format("moment-sweep: T={} A={}: p=2 rel err {:.2e}, ratio {}\n", T, m.fourth.A, e2, m.fourth.ratio);
                ok = false;
            }
            for (const MomentReport& r : {m.second, m.fourth})
                csv.row({num(r.T), num(r.A), std::to_string(r.p), num(r.value), num(r.est_error), num(r.prediction), num(r.ratio)});
        }
    }
    csv.write(c.out);
    std::string plot = c.plot;
    if (plot.empty() && !c.out.empty()) plot = std::filesystem::path(c.out).replace_extension(".gp").string();
    if (!plot.empty()) write_plot_script(plot, c.out.empty() ? "moment_sweep.csv" : c.out, c.A);
    return ok ? kExitOk : kExitFail;
}

int cmd_weights_audit(const RunConfig& c) {
    SpectralSetup s;
    s.alpha = c.alpha;
    s.validate();
    CsvEmitter csv("weights-audit", {"check", "parameters", "value", "threshold", "pass"});
    bool ok = true;
    for (const AuditRow& r : weights_audit(c.alpha)) {
        ok = ok && r.pass;
        csv.row({r.check, r.parameters, num(r.value), num(r.threshold), r.pass ? "pass" : "fail"});
    }
    csv.write(c.out);
    return ok ? kExitOk : kExitFail;
}

int cmd_kuznetsov(const RunConfig& c) {
    if (c.c_max < 4) throw UsageError("--c-max must be at least 4");
    std::vector<std::pair<long long, long long>> pairs;
    for (const std::string& p : c.pairs) {
        long long n = 0, m = 0;
        char colon = 0;
        std::istringstream in(p);
        if (!(in >> n >> colon >> m) || colon != ':' || n < 1 || m < 1) throw UsageError("--pairs expects n:m entries, got " + p);
        pairs.emplace_back(std::min(n, m), std::max(n, m));
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    TestFunction phi;
    phi.width = c.width;
    phi.validate();
    const auto forms = ingest_forms_file(c.forms);

    CsvEmitter csv("kuznetsov", {"n", "m", "c_max", "discrete", "continuous", "spectral", "delta", "kloosterman", "geometric", "closure",
                                 "c_tail", "basis_tail", "closure_bound", "attribution"});
    bool ok = true;
    for (auto [n, m] : pairs) {
        const KuznetsovReport r = kuznetsov_two_sides(n, m, phi, forms, c.c_max);
        for (std::size_t i = 0; i < r.partials.size(); ++i) {
            const KloostermanPartial& p = r.partials[i];
            const double geo = r.delta + p.sum, closure = std::abs(r.spectral - geo);
            const double bound = r.basis_tail + p.tail_estimate + r.quadrature_error;
            csv.row({std::to_string(n), std::to_string(m), std::to_string(p.c_max), num(r.discrete), num(r.continuous), num(r.spectral),
                     num(r.delta), num(p.sum), num(geo), num(closure), num(p.tail_estimate), num(r.basis_tail), num(bound),
                     r.basis_tail >= p.tail_estimate ? "basis truncation" : "c truncation"});
            if (i > 0 && p.tail_estimate > r.partials[i - 1].tail_estimate) ok = false;
        }
        if (r.closure > r.closure_bound) {
            std::cerr << fmt::format("kuznetsov: n={} m={}: closure {:.3e} exceeds bound {:.3e}\n", n, m, r.closure, r.closure_bound);
            ok = false;
        }
    }
    csv.write(c.out);
    return ok ? kExitOk : kExitFail;
}

int cmd_acceptance(const RunConfig& c) {
    AcceptanceOptions opt;
    opt.alpha = c.alpha;
    opt.forms_path = c.forms;
    opt.quick = c.quick;
    SpectralSetup s;
    s.alpha = c.alpha;
    s.validate();
    std::set<int> expected(c.expect_red.begin(), c.expect_red.end()), red;
    for (int id : expected)
        if (id < 1 || id > 10) throw UsageError("--expect-red takes criterion numbers 1..10");
    std::unique_ptr<CsvEmitter> csv;
    if (!c.out.empty()) csv = std::make_unique<CsvEmitter>("acceptance", std::vector<std::string>{"criterion", "name", "result", "seconds", "detail"});
    for (int id = 1; id <= 10; ++id) {
        if (c.quick && !in_quick_subset(id)) {
            std::cout << fmt::format("criterion {:2}: SKIP (not in the quick subset)\n", id);
            continue;
        }
        CriterionResult r;
        try {
            r = run_criterion(id, opt);
        } catch (const std::exception& e) {
            r.id = id;
            r.name = "error";
            r.detail = e.what();
        }
        if (!r.pass) red.insert(id);
        std::cout << fmt::format("criterion {:2}: {} {}: {} [{:.1f}s]\n", id, r.pass ? "PASS" : "FAIL", r.name, r.detail, r.seconds)
                  << std::flush;
        if (csv) csv->row({std::to_string(id), r.name, r.pass ? "PASS" : "FAIL", fmt::format("{:.1f}", r.seconds), r.detail});
    }
    if (csv) csv->write(c.out);
    auto list = [](const std::set<int>& s) {
        std::string out;
        for (int i : s) out += (out.empty() ? "" : ",") + std::to_string(i);
        return out.empty() ? std::string("none") : out;
    };
    if (c.expect_red.empty()) {
        std::cout << "failing: " << list(red) << "\n";
        return red.empty() ? kExitOk : kExitFail;
    }
    if (c.quick)
        for (auto it = expected.begin(); it != expected.end();) it = in_quick_subset(*it) ? std::next(it) : expected.erase(it);
    std::cout << "failing: " << list(red) << "; expected red: " << list(expected) << "\n";
    return red == expected ? kExitOk : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks for the fourth moment of truncated Eisenstein series"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--T", cfg.T, "spectral parameters T")->delimiter(',');
        sub->add_option("--A", cfg.A, "truncation heights A")->delimiter(',');
        sub->add_option("--alpha", cfg.alpha, "exponent alpha in (0, 1/100)");
        sub->add_option("--B", cfg.B, "bump centre B");
        sub->add_option("--tol", cfg.tol, "tolerance (command default when omitted)");
        sub->add_option("--threads", cfg.threads, "OpenMP threads (0: runtime default)");
        sub->add_option("--out", cfg.out, "output CSV (stdout when omitted)");
        sub->add_option("--forms", cfg.forms, "Maass form CSV");
        sub->add_flag("--quick", cfg.quick, "acceptance: sub-minute subset");
        sub->add_option("--config", cfg.config, "key=value file; command-line flags take precedence");
    };
    CLI::App* ms = app.add_subcommand("maass-selberg", "closed-form vs quadrature int E_A^2");
    CLI::App* sw = app.add_subcommand("moment-sweep", "fourth and second moments over a (T, A) grid");
    CLI::App* wa = app.add_subcommand("weights-audit", "support, decay and contour checks of the weight functions");
    CLI::App* kz = app.add_subcommand("kuznetsov", "two sides of the Kuznetsov formula on the fixture basis");
    CLI::App* ac = app.add_subcommand("acceptance", "the ten acceptance criteria");
    for (CLI::App* s : {ms, sw, wa, kz, ac}) common(s);
    sw->add_option("--plot", cfg.plot, "gnuplot script path (default: --out with .gp)");
    kz->add_option("--c-max", cfg.c_max, "largest modulus c");
    kz->add_option("--width", cfg.width, "Gaussian test function width");
    kz->add_option("--pairs", cfg.pairs, "n:m pairs")->delimiter(',');
    ac->add_option("--expect-red", cfg.expect_red, "criteria expected to fail; exit 0 iff exactly these fail")->delimiter(',');

    try {
        std::vector<std::string> args = merge_config(argc, argv, {"maass-selberg", "moment-sweep", "weights-audit", "kuznetsov", "acceptance"});
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (cfg.threads < 0) {
        std::cerr << "usage error: --threads must be >= 0\n";
        return kExitUsage;
    }
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);

    try {
        if (ms->parsed()) return cmd_maass_selberg(cfg);
        if (sw->parsed()) return cmd_moment_sweep(cfg);
        if (wa->parsed()) return cmd_weights_audit(cfg);
        if (kz->parsed()) return cmd_kuznetsov(cfg);
        return cmd_acceptance(cfg);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
}
