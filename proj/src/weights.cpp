#include "msrv/weights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "msrv/ksum.hpp"

namespace msrv {

const char* to_string(WeightProvenance p) {
    switch (p) {
        case WeightProvenance::discrete_optimal: return "discrete-optimal";
        case WeightProvenance::h_family: return "h-family";
        case WeightProvenance::diagnostic: return "diagnostic";
    }
    return "unknown";
}

WeightScheme WeightScheme::diagnostic_single_scale() {
    WeightScheme s;
    s.scales = {1};
    s.weights = {1.0};
    s.provenance = WeightProvenance::diagnostic;
    s.cond1_residual = 0.0;
    s.cond2_residual = 1.0;
    return s;
}

int WeightScheme::max_scale() const {
    return scales.empty() ? 0 : scales.back();
}

namespace {

void compute_residuals(WeightScheme& s) {
    KahanSum c1, c2;
    for (std::size_t i = 0; i < s.scales.size(); ++i) {
        c1.add(s.weights[i]);
        c2.add(s.weights[i] / s.scales[i]);
    }
    s.cond1_residual = c1.value() - 1.0;
    s.cond2_residual = c2.value();
}

} // namespace

void WeightScheme::validate() const {
    if (scales.empty() || scales.size() != weights.size())
        throw std::invalid_argument("weight scheme: scales/weights size mismatch");
    if (scales.front() < 1)
        throw std::invalid_argument("weight scheme: scales must be positive");
    for (std::size_t i = 1; i < scales.size(); ++i)
        if (scales[i] <= scales[i - 1])
            throw std::invalid_argument("weight scheme: scales must be strictly increasing");
    for (double w : weights)
        if (!std::isfinite(w))
            throw std::invalid_argument("weight scheme: non-finite weight");

    if (provenance == WeightProvenance::diagnostic) return;

    if (scales.size() < 2)
        throw std::invalid_argument(
            "weight scheme: Condition 2 needs at least two distinct scales");

    const double m = static_cast<double>(scales.size());
    double tol1 = kExactConditionTol;
    double tol2 = kExactConditionTol;
    if (provenance == WeightProvenance::h_family) {
        tol1 = kHFamilyCond1Coeff / (m * m);
        tol2 = kHFamilyCond2Coeff / (m * m * m);
    }
    if (std::abs(cond1_residual) > tol1)
        throw std::invalid_argument("weight scheme: Condition 1 residual too large");
    if (std::abs(cond2_residual) > tol2)
        throw std::invalid_argument("weight scheme: Condition 2 residual too large");
}

double gamma_sq(const WeightScheme& scheme) {
    KahanSum sum;
    for (std::size_t i = 0; i < scheme.scales.size(); ++i) {
        const double r = scheme.weights[i] / scheme.scales[i];
        sum.add(r * r);
    }
    return 4.0 * sum.value();
}

HSpec hstar() {
    HSpec spec;
    spec.h = [](double x) { return 12.0 * (x - 0.5); };
    spec.dh = [](double) { return 12.0; };
    spec.d2h = [](double) { return 0.0; };
    spec.name = "hstar";
    return spec;
}

WeightScheme optimal_discrete_weights(std::span<const int> scales) {
    const std::size_t m = scales.size();
    if (m < 2)
        throw std::invalid_argument("optimal weights need at least 2 scales");
    for (std::size_t i = 0; i < m; ++i) {
        if (scales[i] < 1)
            throw std::invalid_argument("scales must be positive integers");
        if (i > 0 && scales[i] <= scales[i - 1])
            throw std::invalid_argument("scales must be strictly increasing");
    }

    KahanSum mean_acc, sq_acc;
    for (int k : scales) {
        mean_acc.add(k);
        sq_acc.add(static_cast<double>(k) * k);
    }
    const double md = static_cast<double>(m);
    const double mean = mean_acc.value() / md;
    const double var = sq_acc.value() / md - mean * mean;
    if (!(var > 0.0))
        throw std::invalid_argument("scale variance is zero; weights are singular");

    WeightScheme s;
    s.scales.assign(scales.begin(), scales.end());
    s.weights.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double k = scales[i];
        s.weights[i] = k * (k - mean) / (md * var);
    }
    s.provenance = WeightProvenance::discrete_optimal;
    compute_residuals(s);
    s.validate();
    return s;
}

WeightScheme approxweight_scheme(int m) {
    if (m < 2) throw std::invalid_argument("approxweight_scheme needs M >= 2");
    const double md = m;
    WeightScheme s;
    s.scales.resize(m);
    s.weights.resize(m);
    const double denom = 1.0 - 1.0 / (md * md);
    for (int i = 1; i <= m; ++i) {
        s.scales[i - 1] = i;
        const double x = i / md;
        s.weights[i - 1] = 12.0 * (i / (md * md)) * (x - 0.5 - 0.5 / md) / denom;
    }
    s.provenance = WeightProvenance::discrete_optimal;
    compute_residuals(s);
    s.validate();
    return s;
}

WeightScheme h_family_weights(const HSpec& spec, int m) {
    if (m < 2) throw std::invalid_argument("h_family_weights needs M >= 2");
    const auto report = check_h_conditions(spec);
    if (!report.ok())
        throw std::invalid_argument("h fails the integral conditions: generator '" +
                                    spec.name + "'");

    const double h2 = (spec.dh(1.0) - spec.dh(0.0)) / 6.0;
    const double h3 = (spec.d2h(1.0) - spec.d2h(0.0)) / 24.0;

    const double md = m;
    WeightScheme s;
    s.scales.resize(m);
    s.weights.resize(m);
    for (int i = 1; i <= m; ++i) {
        const double x = i / md;
        s.scales[i - 1] = i;
        s.weights[i - 1] = (i / (md * md)) * spec.h(x) -
                           0.5 * (i / (md * md * md)) * spec.dh(x) +
                           (i / (md * md * md)) * h2 +
                           (i / (md * md * md * md)) * h3;
    }
    s.provenance = WeightProvenance::h_family;
    compute_residuals(s);
    s.validate();
    return s;
}

bool HConditionReport::ok(double tol) const {
    return std::abs(cond3_residual) <= tol && std::abs(cond4_residual) <= tol;
}

HConditionReport check_h_conditions(const HSpec& spec, int quadrature_nodes) {
    if (quadrature_nodes < 64)
        throw std::invalid_argument("check_h_conditions needs >= 64 nodes");

    HConditionReport r{};
    r.cond3_residual =
        quadrature([&](double x) { return x * spec.h(x); }, 0.0, 1.0, quadrature_nodes) -
        1.0;
    r.cond4_residual = quadrature(spec.h, 0.0, 1.0, quadrature_nodes);

    // Canonical corrections: h1 = -h'/2, constant h2 and h3. The identities
    // below are the three constraints the correction terms must satisfy;
    // with this choice each vanishes analytically.
    const double dh0 = spec.dh(0.0), dh1 = spec.dh(1.0);
    const double d2h0 = spec.d2h(0.0), d2h1 = spec.d2h(1.0);
    const double h2 = (dh1 - dh0) / 6.0;
    const double h3 = (d2h1 - d2h0) / 24.0;

    const double int_h1 =
        quadrature([&](double x) { return -0.5 * spec.dh(x); }, 0.0, 1.0,
                   quadrature_nodes);
    const double h1_0 = -0.5 * dh0, h1_1 = -0.5 * dh1;
    const double dh1_0 = -0.5 * d2h0, dh1_1 = -0.5 * d2h1; // h1' = -h''/2

    r.extra_residual[0] = int_h1 + 0.5 * (spec.h(1.0) - spec.h(0.0));
    r.extra_residual[1] = h2 + 0.5 * (h1_1 - h1_0) + (dh1 - dh0) / 12.0;
    r.extra_residual[2] = h3 + (dh1_1 - dh1_0) / 12.0;
    return r;
}

} // namespace msrv
