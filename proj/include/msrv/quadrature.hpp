#pragma once

#include <functional>
#include <vector>

namespace msrv {

/// Gauss-Legendre rule on [-1, 1]. Exact for polynomials of degree
/// <= 2*order - 1.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes and weights for the given order (cached; order >= 1).
const QuadratureRule& gauss_legendre(int order);

/// ∫_a^b f, single Gauss-Legendre panel of the given order.
/// Throws std::invalid_argument for a >= b and numeric_error if f produces a
/// non-finite sample.
double quadrature(const std::function<double(double)>& f, double a, double b,
                  int nodes);

/// ∫_0^1 dx ∫_0^x f(x, y) dy with the same rule on both axes.
double quadrature_lower_triangle(const std::function<double(double, double)>& f,
                                 int nodes);

/// Number of nodes used for all condition checks and variance integrals.
inline constexpr int kDefaultQuadratureNodes = 128;

} // namespace msrv
