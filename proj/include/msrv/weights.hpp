#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "msrv/quadrature.hpp"

namespace msrv {

enum class WeightProvenance {
    discrete_optimal, // exact constrained minimiser of the noise variance
    h_family,         // generated from an h function; conditions hold asymptotically
    diagnostic,       // explicit weights, unbiasedness conditions not enforced
};

const char* to_string(WeightProvenance p);

/// Residual tolerances enforced by WeightScheme::validate(). The h-family
/// constants were calibrated on the linear optimal generator (its Condition-1
/// residual is exactly -1/M² and its Condition-2 residual is rounding-level)
/// and carry headroom for other smooth generators.
inline constexpr double kExactConditionTol = 1e-10;
inline constexpr double kHFamilyCond1Coeff = 10.0; // |Σa - 1|   <= coeff / M²
inline constexpr double kHFamilyCond2Coeff = 2.0;  // |Σa/K|     <= coeff / M³

/// Scales K_1 < ... < K_M and weights a_1..a_M for the multi-scale
/// combination Σ a_i [Y,Y]^(K_i). Condition 1 (Σa = 1) makes the estimator
/// asymptotically unbiased; Condition 2 (Σa/K = 0) cancels the accumulated
/// noise-variance bias exactly.
struct WeightScheme {
    std::vector<int> scales;
    std::vector<double> weights;
    WeightProvenance provenance = WeightProvenance::diagnostic;
    double cond1_residual = 0.0; // Σa - 1
    double cond2_residual = 0.0; // Σ a/K

    /// Single-scale scheme {K=1, a=1}; msrv() degenerates to plain realized
    /// volatility. Condition 2 cannot hold with one scale, so this is only
    /// accepted under the diagnostic provenance.
    static WeightScheme diagnostic_single_scale();

    std::size_t size() const { return scales.size(); }
    int max_scale() const;

    /// Checks structural invariants and the provenance-dependent condition
    /// residual bounds; throws std::invalid_argument.
    void validate() const;
};

/// 4 Σ (a_i / K_i)²: the noise-variance constant of the scheme. Equals
/// 4/(M Var(K)) for the optimal weights and 48/(M(M²-1)) when K_i = i.
double gamma_sq(const WeightScheme& scheme);

/// Weight-generating function on [0,1] with analytic first and second
/// derivatives (the boundary values of h' and h'' enter the correction
/// terms exactly).
struct HSpec {
    std::function<double(double)> h;
    std::function<double(double)> dh;
    std::function<double(double)> d2h;
    std::string name;
};

/// The noise-optimal generator h*(x) = 12(x - 1/2).
HSpec hstar();

/// a_i = K_i (K_i - K̄) / (M Var(K)), the exact minimiser of gamma_sq subject
/// to Conditions 1-2. scales must be strictly increasing positive integers,
/// M >= 2; all-equal scales make Var(K) = 0 and are rejected.
WeightScheme optimal_discrete_weights(std::span<const int> scales);

/// Closed form of the optimal weights for K_i = i:
/// a_i = 12 (i/M²) (i/M - 1/2 - 1/(2M)) / (1 - 1/M²).
WeightScheme approxweight_scheme(int m);

/// Weights generated from h on scales K_i = i:
///   a_i = (i/M²) h(i/M) - (i/(2M³)) h'(i/M) + (i/M³) h2 + (i/M⁴) h3,
/// with the canonical correction constants h2 = (h'(1)-h'(0))/6 and
/// h3 = (h''(1)-h''(0))/24. h must satisfy the two integral conditions
/// (checked by quadrature) or the call throws std::invalid_argument.
WeightScheme h_family_weights(const HSpec& spec, int m);

struct HConditionReport {
    double cond3_residual; // ∫ x h(x) dx - 1
    double cond4_residual; // ∫ h(x) dx
    double extra_residual[3];
    bool ok(double tol = 1e-8) const;
};

/// Residuals of the integral conditions on h and of the three correction-term
/// identities under the canonical h1 = -h'/2, constant h2, h3 choice.
HConditionReport check_h_conditions(const HSpec& spec,
                                    int quadrature_nodes = kDefaultQuadratureNodes);

} // namespace msrv
