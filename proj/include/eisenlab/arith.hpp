#pragma once

#include <vector>

#include "eisenlab/common.hpp"
#include "eisenlab/maass_form.hpp"

namespace eisenlab {

// Positive divisors of every m <= limit, sieved once; trial division above the limit.
class DivisorTable {
public:
    explicit DivisorTable(int limit);
    int limit() const { return limit_; }
    // Ascending divisors of m >= 1.
    std::vector<long long> divisors(long long m) const;
    int count(long long m) const;

private:
    int limit_;
    std::vector<int> offset_;  // divisors of m live in flat_[offset_[m], offset_[m+1])
    std::vector<int> flat_;
};

// Shared table sized for desk-scale use (limit 2^17).
const DivisorTable& default_divisors();

long long gcd_ll(long long a, long long b);
// Inverse of x modulo c, requires gcd(x, c) = 1.
long long mod_inverse(long long x, long long c);

// tau(m, gamma) = sum_{ab=m} (a/b)^{i gamma}; real and even in gamma.
double tau_gen(long long m, double gamma);
// sum_{d | m} d^a.
cplx sigma_complex(long long m, cplx a);

// S(n, m; c), real. Checks the Weil bound d(c) sqrt(gcd(n,m,c)) sqrt(c) and throws std::logic_error on violation.
double kloosterman(long long n, long long m, long long c);

struct RamanujanCheck {
    cplx lhs;           // sum_{n<=N} sigma_a(n) sigma_b(n) n^{-s}
    double tail;        // estimate of the omitted tail from the mean value of d(n)^2
    cplx rhs;           // zeta(s) zeta(s-a) zeta(s-b) zeta(s-a-b) / zeta(2s-a-b)
};
// Requires Re s > 1 + max(0,Re a) + max(0,Re b) and N >= 1000, else throws ConvergenceError.
RamanujanCheck ramanujan_lhs(cplx a, cplx b, cplx s, int N);

// |lambda(n) lambda(m) - sum_{k | (n,m)} lambda(nm/k^2)|.
double hecke_relation_check(const MaassForm& form, long long n, long long m);

}  // namespace eisenlab
