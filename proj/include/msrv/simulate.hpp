#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "msrv/estimators.hpp"
#include "msrv/grid.hpp"
#include "msrv/inference.hpp"
#include "msrv/weights.hpp"

namespace msrv {

// ---------------------------------------------------------------------------
// configuration

struct ConstantVol {
    double sigma2 = 0.1;
};

/// σ²(t) = sigma2 · (1 + slope · t/T).
struct LinearVol {
    double sigma2 = 0.1;
    double slope = 1.0;
};

/// Mean-reverting variance dV = rate(long_run - V)dt + vol_of_vol √V dW,
/// correlation between W and the price driver. Euler full truncation on a
/// 10x finer internal grid.
struct MeanRevVol {
    double rate = 5.0;
    double long_run = 0.1;
    double vol_of_vol = 0.5;
    double correlation = -0.5;
    double v0 = 0.1;
};

using VolModel = std::variant<ConstantVol, LinearVol, MeanRevVol>;

enum class NoiseKind { none, gaussian, two_point, student_t };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::gaussian;
    double scale = 0.0;  // a: the noise standard deviation
    double df = 6.0;     // student-t only; finite 4th moment needs df > 4
};

struct EquidistantGrid {};

/// t_i = T (i/n)^exponent; exponent >= 1 keeps the map Lipschitz.
struct PowerGrid {
    double exponent = 2.0;
};

using GridPolicy = std::variant<EquidistantGrid, PowerGrid>;

struct SimConfig {
    VolModel model = ConstantVol{};
    double drift = 0.0;
    NoiseSpec noise;
    GridPolicy grid = EquidistantGrid{};
    std::size_t n = 4096;
    double horizon = 1.0;
    std::uint64_t seed = 1;
    std::size_t replications = 200;
    int threads = 0; // 0 = hardware concurrency

    void validate() const; // throws config_error
};

// ---------------------------------------------------------------------------
// paths

struct PathBundle {
    SamplingGrid grid;
    std::vector<double> latent;   // X
    std::vector<double> noise;    // ε
    std::vector<double> observed; // Y = X + ε, elementwise
    double true_qv = 0.0;         // ∫σ² dt along the simulated variance path
    double true_eta_sq = 0.0;     // ∫H'σ⁴ dt (exact H' of the grid policy)
    double true_e2 = 0.0;         // Eε² of the configured noise
    double true_e4 = 0.0;         // Eε⁴

    TickSeries observed_series() const { return TickSeries(grid, observed); }
};

/// Simulate one path. Deterministic given (config, seed): the same seed
/// reproduces the bundle bit for bit.
PathBundle gen_path(const SimConfig& config, std::uint64_t seed);

/// Exact H' of a grid policy at time t (used for the ∫H'σ⁴ reference value).
double policy_aqvt_derivative(const GridPolicy& policy, double t, double horizon);

// ---------------------------------------------------------------------------
// error decomposition

/// Splits the multi-scale estimate on a simulated bundle into
///   signal     Σ a_i [X,X]^(K_i)
///   zeta       Σ a_i U_K,  U_K = -(2/K) Σ ε_i ε_{i-K}   (main noise term)
///   remainder  Σ a_i V_K - 2Eε²                          (edge + cross terms)
/// plus the ε²-cancellation residual 2 (Σ a/K) Σε², which Condition 2 drives
/// to zero. reconstruction() must reproduce msrv_value.
struct ErrorDecomposition {
    double signal = 0.0;
    double zeta = 0.0;
    double remainder = 0.0;
    double epsilon_cancel_residual = 0.0;
    double true_e2 = 0.0;
    double msrv_value = 0.0;

    double reconstruction() const {
        return signal + epsilon_cancel_residual + zeta + remainder + 2.0 * true_e2;
    }
};

ErrorDecomposition decompose_error(const PathBundle& bundle,
                                   const WeightScheme& scheme);

// ---------------------------------------------------------------------------
// experiments

enum class MPolicyKind { sqrt_n, fixed, c_times_sqrt_n, plugin };

struct MPolicy {
    MPolicyKind kind = MPolicyKind::sqrt_n;
    int fixed_m = 16;
    double c = 1.0;

    static MPolicy sqrt_n() { return {}; }
    static MPolicy fixed(int m) { return {MPolicyKind::fixed, m, 1.0}; }
    static MPolicy with_c(double c) { return {MPolicyKind::c_times_sqrt_n, 0, c}; }
    static MPolicy plugin() { return {MPolicyKind::plugin, 0, 1.0}; }
};

/// M for a non-plugin policy (plugin needs data; resolved per replication).
int resolve_m(const MPolicy& policy, std::size_t n);

/// Data-driven M selection: noise moments, a first-pass estimate at
/// M = ceil(sqrt(n)), the constant-vol eta² plug-in, then the variance
/// trade-off constant c clamped to [0.1, 10] and M = max(2, round(c sqrt(n)))
/// with M < n/2.
struct MSelection {
    int m = 2;
    double c = 0.0;
    NoiseMoments moments;
    double qv_initial = 0.0;
    double eta_sq_hat = 0.0;
    bool clamped = false;  // c hit the [0.1, 10] bounds
    bool fallback = false; // degenerate plug-ins; kept M = ceil(sqrt(n))
};

MSelection select_m_plugin(const TickSeries& series, const HSpec& spec);

struct ConvergenceCell {
    std::string estimator;
    std::size_t n = 0;
    double bias = 0.0;
    double rmse = 0.0;
};

struct ConvergenceRep {
    std::string estimator;
    std::size_t n = 0;
    std::size_t rep = 0;
    double estimate = 0.0;
    double true_qv = 0.0;
};

struct ConvergenceResult {
    std::vector<ConvergenceCell> cells;
    std::vector<ConvergenceRep> reps;
    std::map<std::string, double> rmse_slope; // log RMSE vs log n, per estimator
    std::optional<double> rv_bias_slope;      // log |bias| vs log n for rv
    bool low_replication_warning = false;
};

/// Monte Carlo bias/RMSE over an increasing list of at least 4 sample sizes,
/// with per-estimator rate fits. All estimators see identical paths.
ConvergenceResult run_convergence_experiment(const SimConfig& config,
                                             std::span<const std::size_t> n_list,
                                             const MPolicy& policy,
                                             std::span<const std::string> estimators);

struct CoverageRep {
    std::size_t rep = 0;
    double estimate = 0.0;
    double true_qv = 0.0;
    Interval oracle_interval;
    Interval plugin_interval;
    bool oracle_covered = false;
    bool plugin_covered = false;
};

struct CoverageResult {
    double level = 0.0;
    std::size_t replications = 0;
    double oracle_rate = 0.0;
    double plugin_rate = 0.0;
    double oracle_se = 0.0; // binomial standard error
    double plugin_se = 0.0;
    std::vector<CoverageRep> reps;
    bool low_replication_warning = false;
    int m_used = 0;
};

/// Interval coverage of the true qv, in oracle mode (true moments, true η²)
/// and plug-in mode (estimated moments, fixed-point η̂²) on the same paths.
CoverageResult run_coverage_experiment(const SimConfig& config, std::size_t n,
                                       double level, const MPolicy& policy);

struct CompareCell {
    std::string estimator;
    double bias = 0.0;
    double variance = 0.0;
    double rmse = 0.0;
};

struct CompareRep {
    std::size_t rep = 0;
    double rv_value = 0.0;
    double tsrv_value = 0.0;
    double msrv_value = 0.0;
    double true_qv = 0.0;
    int m_used = 0;
    double c_used = 0.0;
};

struct CompareResult {
    std::vector<CompareCell> cells;
    std::vector<CompareRep> reps;
    int tsrv_k = 0;
};

/// rv / tsrv(K = ceil(n^(2/3))) / msrv(M from the plug-in) on common paths.
CompareResult compare_estimators(const SimConfig& config, std::size_t n);

/// OLS slope of log(y) against log(x); pairs with y <= 0 are skipped.
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Run body(0..count-1) on a small worker pool. Results must be written to
/// per-index slots; aggregation order is then independent of scheduling.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body);

} // namespace msrv
