#include "eisenlab/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>
#include <map>
#include <memory>
#include <mutex>

#include "eisenlab/common.hpp"

namespace eisenlab {

const GaussRule& gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: order must be positive");
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaussRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot) {
        auto rule = std::make_unique<GaussRule>();
        // Boost returns the nonnegative zeros in ascending order.
        const auto zeros = boost::math::legendre_p_zeros<double>(n);
        for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
            if (*it == 0.0) continue;
            rule->nodes.push_back(-*it);
        }
        if (n % 2 == 1) rule->nodes.push_back(0.0);
        for (double z : zeros)
            if (z != 0.0) rule->nodes.push_back(z);
        for (double x : rule->nodes) {
            const double dp = boost::math::legendre_p_prime(n, x);
            rule->weights.push_back(2.0 / ((1.0 - x * x) * dp * dp));
        }
        slot = std::move(rule);
    }
    return *slot;
}

void append_gauss(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
    const GaussRule& g = gauss_legendre(n);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < n; ++i) {
        x.push_back(mid + half * g.nodes[i]);
        w.push_back(half * g.weights[i]);
    }
}

double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

}  // namespace eisenlab
