#include "msrv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "msrv/ksum.hpp"

namespace msrv {

SamplingGrid::SamplingGrid(std::vector<double> times, double gap_bound_factor)
    : times_(std::move(times)) {
    if (times_.size() < 3)
        throw std::invalid_argument("grid needs at least 2 increments (3 timestamps)");
    if (times_.front() != 0.0)
        throw std::invalid_argument("grid must start at t = 0");
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i] > times_[i - 1]))
            throw std::invalid_argument("grid times must be strictly increasing");
        max_gap_ = std::max(max_gap_, times_[i] - times_[i - 1]);
    }
    if (!std::isfinite(times_.back()) || times_.back() <= 0.0)
        throw std::invalid_argument("grid horizon must be positive and finite");
    gap_warning_ = max_gap_ > gap_bound_factor * horizon() / static_cast<double>(n());
}

SamplingGrid SamplingGrid::equidistant(std::size_t n, double horizon) {
    if (n < 2) throw std::invalid_argument("equidistant grid needs n >= 2");
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    std::vector<double> times(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        times[i] = horizon * static_cast<double>(i) / static_cast<double>(n);
    times.back() = horizon;
    return SamplingGrid(std::move(times));
}

namespace {

// H at every grid time, one cumulative pass.
std::vector<double> aqvt_at_grid_times(const SamplingGrid& grid) {
    const auto times = grid.times();
    const double scale = static_cast<double>(grid.n()) / grid.horizon();
    std::vector<double> h(times.size());
    KahanSum sum;
    h[0] = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double dt = times[i] - times[i - 1];
        sum.add(dt * dt);
        h[i] = scale * sum.value();
    }
    return h;
}

// Step-function value of H at an arbitrary s in [0, T].
double step_value(std::span<const double> times, const std::vector<double>& h,
                  double s) {
    auto it = std::upper_bound(times.begin(), times.end(), s);
    const auto idx = static_cast<std::size_t>(it - times.begin());
    return idx == 0 ? 0.0 : h[idx - 1];
}

} // namespace

double empirical_aqvt(const SamplingGrid& grid, double t) {
    if (t < 0.0 || t > grid.horizon())
        throw std::domain_error("empirical_aqvt: t outside [0, T]");
    const auto times = grid.times();
    const double scale = static_cast<double>(grid.n()) / grid.horizon();
    KahanSum sum;
    for (std::size_t i = 1; i < times.size() && times[i] <= t; ++i) {
        const double dt = times[i] - times[i - 1];
        sum.add(dt * dt);
    }
    return scale * sum.value();
}

double default_aqvt_bandwidth(const SamplingGrid& grid) {
    return grid.horizon() / std::sqrt(static_cast<double>(grid.n()));
}

AqvtCurve aqvt_derivative(const SamplingGrid& grid, double bandwidth) {
    const double horizon = grid.horizon();
    if (!(bandwidth > 0.0) || bandwidth > 0.5 * horizon)
        throw std::invalid_argument("aqvt bandwidth must lie in (0, T/2]");
    if (grid.n() < 3)
        throw std::invalid_argument("aqvt_derivative needs at least 3 increments");

    const auto times = grid.times();
    const auto h = aqvt_at_grid_times(grid);

    AqvtCurve curve;
    curve.bandwidth = bandwidth;
    curve.points.assign(times.begin(), times.end());
    curve.values = h;
    curve.derivative.resize(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double lo = std::max(times[i] - bandwidth, 0.0);
        const double hi = std::min(times[i] + bandwidth, horizon);
        const double dh = step_value(times, h, hi) - step_value(times, h, lo);
        const double d = dh / (hi - lo);
        curve.derivative[i] = d;
        if (!(d > 0.0)) curve.nonpositive_derivative = true;
    }
    return curve;
}

SamplingGrid time_change(const SamplingGrid& grid,
                         const std::function<double(double)>& g) {
    const auto times = grid.times();
    const double horizon = grid.horizon();
    const double tol = 1e-9 * std::max(1.0, horizon);

    std::vector<double> mapped(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        mapped[i] = g(times[i]);
        if (!std::isfinite(mapped[i]))
            throw std::invalid_argument("time change produced a non-finite value");
        if (i > 0 && !(mapped[i] > mapped[i - 1]))
            throw std::invalid_argument("time change is not strictly increasing");
    }
    if (std::abs(mapped.front()) > tol)
        throw std::invalid_argument("time change must map 0 to 0");
    if (std::abs(mapped.back() - horizon) > tol)
        throw std::invalid_argument("time change must map T to T");
    // snap the endpoints so downstream invariants hold exactly
    mapped.front() = 0.0;
    mapped.back() = horizon;
    return SamplingGrid(std::move(mapped));
}

double equidistance_defect(const SamplingGrid& grid) {
    const auto times = grid.times();
    const double mean_dt = grid.horizon() / static_cast<double>(grid.n());
    KahanSum sum;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double d = (times[i] - times[i - 1]) - mean_dt;
        sum.add(d * d);
    }
    return sum.value();
}

} // namespace msrv
