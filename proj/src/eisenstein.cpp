#include "eisenlab/eisenstein.hpp"

#include <cmath>
#include <stdexcept>

#include "eisenlab/arith.hpp"

namespace eisenlab {

namespace {
constexpr double kSqrt3Half = 0.86602540378443864676;
}

Point Mat2::act(Point z) const {
    const cplx w(z.x, z.y);
    const cplx r = (static_cast<double>(a) * w + static_cast<double>(b)) / (static_cast<double>(c) * w + static_cast<double>(d));
    return {r.real(), r.imag()};
}

bool in_fundamental_domain(Point z, double slack) {
    return z.y > 0.0 && std::abs(z.x) <= 0.5 + slack && z.x * z.x + z.y * z.y >= 1.0 - slack;
}

Reduction reduce(Point z) {
    if (!(z.y > 0.0)) throw DomainError("reduce: y must be positive");
    Reduction r{z, {}};
    for (int it = 0; it < 10000; ++it) {
        const double k = std::floor(r.z.x + 0.5);
        if (k != 0.0) {
            r.z.x -= k;
            r.g = Mat2{1, -static_cast<long long>(k), 0, 1} * r.g;
        }
        const double n2 = r.z.x * r.z.x + r.z.y * r.z.y;
        if (n2 >= 1.0) return r;
        r.z = {-r.z.x / n2, r.z.y / n2};
        r.g = Mat2{0, -1, 1, 0} * r.g;
    }
    throw std::logic_error("reduce: did not terminate");
}

void SpectralSetup::validate() const {
    if (!(T > 0.0 && T <= T_cap)) throw ValidationError("SpectralSetup: T must lie in (0, T_cap]");
    if (!(A > 1.0)) throw ValidationError("SpectralSetup: A must exceed 1");
    if (!(B > 1.0)) throw ValidationError("SpectralSetup: B must exceed 1");
    if (!(alpha > 0.0 && alpha < 0.01)) throw ValidationError("SpectralSetup: alpha must lie in (0, 1/100)");
    precision.validate();
}

cplx FourierRow::oscillating(double x) const {
    double s = 0.0;
    for (std::size_t n = 1; n <= coeff.size(); ++n) s += coeff[n - 1] * e_of(static_cast<double>(n) * x).real();
    return prefactor * (2.0 * s);
}

EisensteinEvaluator::EisensteinEvaluator(const SpectralSetup& setup) : setup_(setup) {
    setup_.validate();
    const double T = setup_.T;
    c_ = scattering(T).c;
    xi_norm_ = xi(cplx(1.0, 2.0 * T));
    prefactor_ = std::exp(cplx(std::log(2.0) - 0.5 * kPi * T - xi_norm_.log_mod, -xi_norm_.phase));
}

int EisensteinEvaluator::n_max(double y) const {
    const double T = setup_.T;
    return static_cast<int>(std::ceil((T + 10.0 * std::cbrt(T) + 40.0) / (kTwoPi * y)));
}

FourierRow EisensteinEvaluator::row(double y, int n) const {
    if (!(y > 0.0)) throw DomainError("row: y must be positive");
    if (n <= 0) n = n_max(y);
    FourierRow r;
    r.y = y;
    r.constant = constant_term(y);
    r.prefactor = prefactor_;
    r.coeff.resize(n);
    const double sy = std::sqrt(y);
    for (int k = 1; k <= n; ++k)
        r.coeff[k - 1] = tau_gen(k, setup_.T) * sy * bessel_k_scaled(setup_.T, kTwoPi * k * y, setup_.precision);
    return r;
}

cplx EisensteinEvaluator::constant_term(double y) const {
    if (!(y > 0.0)) throw DomainError("constant_term: y must be positive");
    const cplx p = std::polar(std::sqrt(y), setup_.T * std::log(y));  // y^{1/2 + iT}
    return p + c_ * std::conj(p);
}

cplx EisensteinEvaluator::eval_fourier(Point z, int n) const {
    const FourierRow r = row(z.y, n);
    return r.constant + r.oscillating(z.x);
}

cplx EisensteinEvaluator::eval_E(Point z) const {
    const Reduction red = reduce(z);
    if (red.z.y < kSqrt3Half - 1e-9) throw std::logic_error("eval_E: reduction left y below sqrt(3)/2");
    return eval_fourier(red.z);
}

cplx EisensteinEvaluator::eval_E_trunc(Point z) const {
    if (!in_fundamental_domain(z)) throw DomainError("eval_E_trunc: point outside the fundamental domain");
    const FourierRow r = row(z.y);
    const cplx osc = r.oscillating(z.x);
    return z.y > setup_.A ? osc : r.constant + osc;
}

cplx EisensteinEvaluator::eval_H_A(Point z) const {
    if (!in_fundamental_domain(z)) throw DomainError("eval_H_A: point outside the fundamental domain");
    if (z.y <= setup_.A) return 0.0;
    return 2.0 * constant_term(z.y) * eval_E_trunc(z);
}

}  // namespace eisenlab
