#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "msrv/estimators.hpp"
#include "msrv/grid.hpp"
#include "msrv/weights.hpp"

namespace msrv {

/// Noise moments. The estimator treats them as plug-ins: reports must flag
/// them as estimated rather than known.
struct NoiseMoments {
    double e2 = 0.0;     // E ε²
    double e4 = 0.0;     // E ε⁴
    double var_e2 = 0.0; // Var(ε²) = Eε⁴ - (Eε²)²
    bool clamped = false; // a negative sample plug-in was clamped to zero
};

/// High-frequency plug-ins: ê2 = [Y,Y]^(1) / (2n) and
/// ê4 = (Σ(ΔY)⁴/n - 6 ê2²) / 2, both from the dominance of the noise in the
/// observed increments. Needs n >= 10. Negative values clamp to 0 with a flag.
NoiseMoments estimate_noise_moments(const TickSeries& series);

/// gamma_sq(scheme) · n · e2²: the finite-n noise-term variance.
double noise_term_variance(const WeightScheme& scheme, std::size_t n, double e2);

/// ∫ H'(t) σ_t⁴ dt over [0,T], trapezoid over the curve's evaluation points.
/// Throws std::logic_error when the curve carries no derivative estimates.
double eta_sq(const AqvtCurve& curve,
              const std::function<double(double)>& spot_variance);
double eta_sq(const AqvtCurve& curve, double constant_variance);

/// The four h-integrals entering the asymptotic variance. For the optimal
/// generator they evaluate to 12, 39/35, 3/5 and 6/5.
struct HIntegrals {
    double h_sq;       // ∫ h²
    double tri_kernel; // ∫₀¹dx ∫₀ˣ h(y)h(x) y²(3x-y) dy
    double lower_x;    // ∫₀¹∫₀ʸ x h(x)h(y) dx dy
    double min_xy;     // ∬ h(x)h(y) min(x,y) dx dy
};
HIntegrals h_variance_integrals(const HSpec& spec,
                                int nodes = kDefaultQuadratureNodes);

/// (4/3) T η² ∬ h(y)h(x) y²(3x-y): the variance of the pure discretization
/// error at the (n/M)^(1/2) scale.
double discretization_variance(const HSpec& spec, double horizon, double eta_sq);

/// Full asymptotic variance in the n^(1/4) central limit theorem, split into
/// its noise, discretization and remainder components.
struct VarianceReport {
    double noise_term = 0.0;            // 4 c⁻³ (Eε²)² ∫h²
    double discretization_term = 0.0;   // c (4/3) T η² ∬...
    double remainder_cross_terms = 0.0; // 4 c⁻¹ Var(ε²) ∬ + 8 c⁻¹ Eε² qv ∬
    double nu_sq = 0.0;                 // sum of the components
    double c_used = 0.0;
    double eta_sq = 0.0;
    double qv_plugin = 0.0;
};

VarianceReport total_asymptotic_variance(const HSpec& spec, double c,
                                         const NoiseMoments& moments,
                                         double horizon, double eta_sq,
                                         double qv);

/// Minimiser of ν²(c) = A c⁻³ + B c + C c⁻¹ over c > 0:
/// c* = sqrt((C + sqrt(C² + 12AB)) / (2B)). Needs B > 0 (no interior
/// minimum otherwise) and A, C >= 0.
double plug_in_c(double A, double B, double C);

/// Bounds used when the plug-in constant drives M = round(c sqrt(n)).
inline constexpr double kPlugInCMin = 0.1;
inline constexpr double kPlugInCMax = 10.0;

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
    double half_width() const { return 0.5 * (upper - lower); }
};

/// estimate ± z_{(1+level)/2} sqrt(nu_sq) n^(-1/4).
Interval confidence_interval(double estimate, double nu_sq, std::size_t n,
                             double level);

/// Asymptotic covariance of the discretization errors across scale fractions
/// κ: Γ_{IJ} = (2/3) T min(κ_I,κ_J) (3 - min/max).
std::vector<std::vector<double>> discretization_cov_matrix(
    std::span<const double> kappas, double horizon);

/// Inverse standard normal CDF (rational approximation + one Newton polish).
double normal_quantile(double p);

} // namespace msrv
