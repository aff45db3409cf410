#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "eisenlab/common.hpp"

namespace eisenlab {

enum class Parity { even, odd };

// A Hecke-Maass cusp form given by data: spectral parameter and Hecke eigenvalues.
struct MaassForm {
    double t = 0.0;
    Parity parity = Parity::even;
    // lambda[n] for 1 <= n <= n_max(); NaN marks a missing entry. lambda[0] is unused.
    std::vector<double> lambda;
    std::optional<double> sym2_L1;

    int n_max() const { return lambda.empty() ? 0 : static_cast<int>(lambda.size()) - 1; }
    bool has(long long n) const { return n >= 1 && n <= n_max() && !std::isnan(lambda[n]); }
    // Throws DomainError when n is missing.
    double at(long long n) const {
        if (!has(n)) throw DomainError("MaassForm: missing Hecke eigenvalue");
        return lambda[n];
    }
};

}  // namespace eisenlab
