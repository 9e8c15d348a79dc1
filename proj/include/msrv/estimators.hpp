#pragma once

#include <span>
#include <vector>

#include "msrv/grid.hpp"
#include "msrv/weights.hpp"

namespace msrv {

/// Observed log prices on a sampling grid.
struct TickSeries {
    SamplingGrid grid;
    std::vector<double> logprices; // one per grid time, all finite

    TickSeries(SamplingGrid g, std::vector<double> y);

    std::size_t n() const { return grid.n(); } // increment count
};

/// Σ_{i>=k} (y_i - y_{i-k})², compensated. Building block for everything
/// below; requires 1 <= k < y.size().
double sum_sq_lag_increments(std::span<const double> y, int k);

/// Realized volatility: sum of squared one-step increments. Inconsistent
/// under observation noise (bias and variance grow like n).
double rv(const TickSeries& series);
double rv(std::span<const double> logprices);

/// Lag-k averaged realized volatility (1/k) Σ_{i>=k} (Y_i - Y_{i-k})²:
/// the average of the k overlapping subsampled realized volatilities.
/// Requires 1 <= k <= n (throws input_error otherwise).
double avg_lag_rv(const TickSeries& series, int k);
double avg_lag_rv(std::span<const double> logprices, int k);

/// Two-scale estimator [Y,Y]^(K) - 2 (n-K+1)/(nK) [Y,Y]^(1). Requires
/// 2 <= K <= n. May be negative; no truncation is applied.
double tsrv(const TickSeries& series, int k);

/// Multi-scale estimator Σ a_i [Y,Y]^(K_i). The scheme is validated and its
/// largest scale must not exceed n. May be negative; no truncation.
double msrv(const TickSeries& series, const WeightScheme& scheme);

} // namespace msrv
