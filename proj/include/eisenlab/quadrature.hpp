#pragma once

#include <vector>

namespace eisenlab {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes, weights;
};

// Cached and thread-safe; n >= 1.
const GaussRule& gauss_legendre(int n);

// Appends nodes/weights of an n-point rule mapped to [a, b].
void append_gauss(int n, double a, double b, std::vector<double>& x, std::vector<double>& w);

// Pairwise (tree) summation in index order; the result does not depend on how the terms were produced.
double pairwise_sum(const double* v, std::size_t n);

}  // namespace eisenlab
