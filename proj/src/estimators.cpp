#include "msrv/estimators.hpp"

#include <cmath>
#include <stdexcept>

#include "msrv/errors.hpp"
#include "msrv/ksum.hpp"

namespace msrv {

TickSeries::TickSeries(SamplingGrid g, std::vector<double> y)
    : grid(std::move(g)), logprices(std::move(y)) {
    if (logprices.size() != grid.times().size())
        throw input_error("tick series: one log price per grid time required");
    for (double v : logprices)
        if (!std::isfinite(v)) throw input_error("tick series: non-finite log price");
}

double sum_sq_lag_increments(std::span<const double> y, int k) {
    if (k < 1 || static_cast<std::size_t>(k) >= y.size())
        throw input_error("lag must satisfy 1 <= k <= n");
    KahanSum sum;
    for (std::size_t i = static_cast<std::size_t>(k); i < y.size(); ++i) {
        const double d = y[i] - y[i - k];
        sum.add(d * d);
    }
    return sum.value();
}

double rv(std::span<const double> logprices) {
    if (logprices.size() < 2) throw input_error("rv needs at least 2 observations");
    return sum_sq_lag_increments(logprices, 1);
}

double rv(const TickSeries& series) { return rv(std::span<const double>(series.logprices)); }

double avg_lag_rv(std::span<const double> logprices, int k) {
    return sum_sq_lag_increments(logprices, k) / static_cast<double>(k);
}

double avg_lag_rv(const TickSeries& series, int k) {
    return avg_lag_rv(std::span<const double>(series.logprices), k);
}

double tsrv(const TickSeries& series, int k) {
    const auto n = static_cast<double>(series.n());
    if (k < 2) throw std::invalid_argument("tsrv needs K >= 2");
    if (static_cast<std::size_t>(k) > series.n()) throw input_error("tsrv: K exceeds n");
    const double slow = avg_lag_rv(series, k);
    const double fast = rv(series);
    return slow - 2.0 * ((n - k + 1.0) / (n * k)) * fast;
}

double msrv(const TickSeries& series, const WeightScheme& scheme) {
    scheme.validate();
    if (static_cast<std::size_t>(scheme.max_scale()) > series.n())
        throw input_error("msrv: largest scale exceeds n");
    KahanSum sum;
    for (std::size_t i = 0; i < scheme.scales.size(); ++i)
        sum.add(scheme.weights[i] * avg_lag_rv(series, scheme.scales[i]));
    return sum.value();
}

} // namespace msrv
