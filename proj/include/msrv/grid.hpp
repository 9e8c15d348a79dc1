#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace msrv {

/// Factor in the max-gap regularity check: max Δt <= factor * T/n.
/// Exceeding it is a warning, not an error, so real tick data with a
/// lunch-break gap still loads.
inline constexpr double kDefaultGapBoundFactor = 50.0;

/// Observation-time grid 0 = t_0 < t_1 < ... < t_n = T.
class SamplingGrid {
public:
    /// times must be strictly increasing with times.front() == 0 and at
    /// least two increments (n >= 2). Throws std::invalid_argument.
    explicit SamplingGrid(std::vector<double> times,
                          double gap_bound_factor = kDefaultGapBoundFactor);

    static SamplingGrid equidistant(std::size_t n, double horizon);

    std::size_t n() const { return times_.size() - 1; } // increment count
    double horizon() const { return times_.back(); }
    std::span<const double> times() const { return times_; }
    double max_gap() const { return max_gap_; }
    bool gap_bound_exceeded() const { return gap_warning_; }

private:
    std::vector<double> times_;
    double max_gap_ = 0.0;
    bool gap_warning_ = false;
};

/// Empirical quadratic variation of time and a finite-difference estimate of
/// its derivative, tabulated on evaluation points.
struct AqvtCurve {
    std::vector<double> points;     // evaluation times in [0, T]
    std::vector<double> values;     // H(t), nondecreasing, H(0) = 0
    std::vector<double> derivative; // H'(t) estimates
    double bandwidth = 0.0;
    /// Set instead of failing when some H' estimate is <= 0 (the variance
    /// formulas assume min H' > 0).
    bool nonpositive_derivative = false;
};

/// (n/T) Σ_{t_i <= t, i >= 1} (t_i - t_{i-1})², the finite-n value of the
/// asymptotic quadratic variation of time. Throws std::domain_error for t
/// outside [0, T].
double empirical_aqvt(const SamplingGrid& grid, double t);

/// Default finite-difference bandwidth T/sqrt(n).
double default_aqvt_bandwidth(const SamplingGrid& grid);

/// Symmetric finite-difference estimate of H' at every grid time, windows
/// clamped to [0, T]. bandwidth must lie in (0, T/2]; grids with fewer than
/// 3 increments are rejected.
AqvtCurve aqvt_derivative(const SamplingGrid& grid, double bandwidth);

/// New grid with times g(t_i). g must be strictly increasing with g(0) = 0
/// and g(T) = T; violations throw std::invalid_argument.
SamplingGrid time_change(const SamplingGrid& grid,
                         const std::function<double(double)>& g);

/// Σ_i (Δt_i - T/n)². Zero exactly for equidistant grids; o(1/n) decay
/// characterises grids that behave as equidistant.
double equidistance_defect(const SamplingGrid& grid);

} // namespace msrv
