#include "msrv/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "msrv/errors.hpp"
#include "msrv/ksum.hpp"

namespace msrv {

NoiseMoments estimate_noise_moments(const TickSeries& series) {
    const std::size_t n = series.n();
    if (n < 10) throw input_error("noise moment estimation needs n >= 10");

    const auto& y = series.logprices;
    KahanSum sq, quart;
    for (std::size_t i = 1; i < y.size(); ++i) {
        const double d = y[i] - y[i - 1];
        sq.add(d * d);
        quart.add(d * d * d * d);
    }
    NoiseMoments m;
    m.e2 = sq.value() / (2.0 * static_cast<double>(n));
    const double m4 = quart.value() / static_cast<double>(n);
    double e4 = 0.5 * (m4 - 6.0 * m.e2 * m.e2);
    if (e4 < 0.0) {
        e4 = 0.0;
        m.clamped = true;
    }
    m.e4 = e4;
    double v = m.e4 - m.e2 * m.e2;
    if (v < 0.0) {
        v = 0.0;
        m.clamped = true;
    }
    m.var_e2 = v;
    return m;
}

double noise_term_variance(const WeightScheme& scheme, std::size_t n, double e2) {
    return gamma_sq(scheme) * static_cast<double>(n) * e2 * e2;
}

double eta_sq(const AqvtCurve& curve,
              const std::function<double(double)>& spot_variance) {
    if (curve.derivative.empty() || curve.derivative.size() != curve.points.size())
        throw std::logic_error("eta_sq: curve carries no derivative estimates");
    KahanSum sum;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const double dt = curve.points[i] - curve.points[i - 1];
        const double va = spot_variance(curve.points[i - 1]);
        const double vb = spot_variance(curve.points[i]);
        const double fa = curve.derivative[i - 1] * va * va;
        const double fb = curve.derivative[i] * vb * vb;
        sum.add(0.5 * (fa + fb) * dt);
    }
    return sum.value();
}

double eta_sq(const AqvtCurve& curve, double constant_variance) {
    return eta_sq(curve, [constant_variance](double) { return constant_variance; });
}

HIntegrals h_variance_integrals(const HSpec& spec, int nodes) {
    HIntegrals out{};
    out.h_sq = quadrature([&](double x) { const double h = spec.h(x); return h * h; },
                          0.0, 1.0, nodes);
    out.tri_kernel = quadrature_lower_triangle(
        [&](double x, double y) {
            return spec.h(y) * spec.h(x) * y * y * (3.0 * x - y);
        },
        nodes);
    out.lower_x = quadrature_lower_triangle(
        [&](double y, double x) { return x * spec.h(x) * spec.h(y); }, nodes);
    // ∬ h(x)h(y) min(x,y) over the square = 2 ∫₀¹ h(x) ∫₀ˣ y h(y) dy dx,
    // which avoids integrating across the min() kink.
    out.min_xy = 2.0 * quadrature_lower_triangle(
                           [&](double x, double y) { return spec.h(x) * y * spec.h(y); },
                           nodes);
    return out;
}

double discretization_variance(const HSpec& spec, double horizon, double eta_sq) {
    const auto ints = h_variance_integrals(spec);
    return (4.0 / 3.0) * horizon * eta_sq * ints.tri_kernel;
}

VarianceReport total_asymptotic_variance(const HSpec& spec, double c,
                                         const NoiseMoments& moments,
                                         double horizon, double eta_sq,
                                         double qv) {
    if (!(c > 0.0)) throw std::invalid_argument("asymptotic variance needs c > 0");
    const auto ints = h_variance_integrals(spec);

    VarianceReport r;
    r.c_used = c;
    r.eta_sq = eta_sq;
    r.qv_plugin = qv;
    r.noise_term = 4.0 / (c * c * c) * moments.e2 * moments.e2 * ints.h_sq;
    r.discretization_term = c * (4.0 / 3.0) * horizon * eta_sq * ints.tri_kernel;
    r.remainder_cross_terms = 4.0 / c * moments.var_e2 * ints.lower_x +
                              8.0 / c * moments.e2 * ints.min_xy * qv;
    r.nu_sq = r.noise_term + r.discretization_term + r.remainder_cross_terms;
    return r;
}

double plug_in_c(double A, double B, double C) {
    if (!(B > 0.0))
        throw std::invalid_argument("plug_in_c: no interior minimum without B > 0");
    if (A < 0.0 || C < 0.0)
        throw std::invalid_argument("plug_in_c: coefficients must be nonnegative");
    const double disc = std::sqrt(C * C + 12.0 * A * B);
    return std::sqrt((C + disc) / (2.0 * B));
}

namespace {

// Acklam's rational approximation of the inverse normal CDF,
// polished with one Newton step through erfc.
double inv_norm_approx(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double plow = 0.02425;

    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

} // namespace

double normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0))
        throw std::invalid_argument("normal_quantile needs p in (0,1)");
    double x = inv_norm_approx(p);
    const double cdf = 0.5 * std::erfc(-x / std::numbers::sqrt2);
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    if (pdf > 0.0) x -= (cdf - p) / pdf;
    return x;
}

Interval confidence_interval(double estimate, double nu_sq, std::size_t n,
                             double level) {
    if (!(nu_sq > 0.0)) throw std::invalid_argument("confidence_interval: nu_sq must be > 0");
    if (!(level > 0.0) || !(level < 1.0))
        throw std::invalid_argument("confidence level must lie in (0,1)");
    const double z = normal_quantile(0.5 * (1.0 + level));
    const double hw = z * std::sqrt(nu_sq) / std::pow(static_cast<double>(n), 0.25);
    return {estimate - hw, estimate + hw};
}

std::vector<std::vector<double>> discretization_cov_matrix(
    std::span<const double> kappas, double horizon) {
    for (double k : kappas)
        if (!(k > 0.0)) throw input_error("scale fractions must be positive");
    const std::size_t L = kappas.size();
    std::vector<std::vector<double>> gamma(L, std::vector<double>(L));
    for (std::size_t i = 0; i < L; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double lo = std::min(kappas[i], kappas[j]);
            const double hi = std::max(kappas[i], kappas[j]);
            const double value = (2.0 / 3.0) * horizon * lo * (3.0 - lo / hi);
            gamma[i][j] = value;
            gamma[j][i] = value;
        }
    }
    return gamma;
}

} // namespace msrv
