#include "msrv/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "msrv/errors.hpp"
#include "msrv/ksum.hpp"

namespace msrv {

namespace {

// Newton iteration on the Legendre polynomial P_n, starting from the
// Chebyshev-like approximation of the k-th root.
QuadratureRule build_rule(int order) {
    QuadratureRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);

    const int half = (order + 1) / 2;
    for (int k = 0; k < half; ++k) {
        double x = std::cos(std::numbers::pi * (k + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // recurrence: (j+1) P_{j+1} = (2j+1) x P_j - j P_{j-1}
            double p0 = 1.0, p1 = x;
            for (int j = 1; j < order; ++j) {
                const double p2 = ((2.0 * j + 1.0) * x * p1 - j * p0) / (j + 1.0);
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[k] = -x;
        rule.nodes[order - 1 - k] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[k] = w;
        rule.weights[order - 1 - k] = w;
    }
    if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
    return rule;
}

} // namespace

const QuadratureRule& gauss_legendre(int order) {
    if (order < 1) throw std::invalid_argument("quadrature order must be >= 1");
    static std::map<int, QuadratureRule> cache;
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    auto [it, inserted] = cache.try_emplace(order);
    if (inserted) it->second = build_rule(order);
    return it->second;
}

double quadrature(const std::function<double(double)>& f, double a, double b,
                  int nodes) {
    if (!(a < b)) throw std::invalid_argument("quadrature requires a < b");
    const auto& rule = gauss_legendre(nodes);
    const double mid = 0.5 * (a + b);
    const double halfw = 0.5 * (b - a);
    KahanSum sum;
    for (int i = 0; i < nodes; ++i) {
        const double fx = f(mid + halfw * rule.nodes[i]);
        if (!std::isfinite(fx)) throw numeric_error("non-finite integrand sample");
        sum.add(rule.weights[i] * fx);
    }
    return halfw * sum.value();
}

double quadrature_lower_triangle(const std::function<double(double, double)>& f,
                                 int nodes) {
    const auto& rule = gauss_legendre(nodes);
    KahanSum outer;
    for (int i = 0; i < nodes; ++i) {
        const double x = 0.5 * (1.0 + rule.nodes[i]);
        KahanSum inner;
        for (int j = 0; j < nodes; ++j) {
            const double y = 0.5 * x * (1.0 + rule.nodes[j]);
            const double fxy = f(x, y);
            if (!std::isfinite(fxy)) throw numeric_error("non-finite integrand sample");
            inner.add(rule.weights[j] * fxy);
        }
        outer.add(rule.weights[i] * (0.5 * x) * inner.value());
    }
    return 0.5 * outer.value();
}

} // namespace msrv
