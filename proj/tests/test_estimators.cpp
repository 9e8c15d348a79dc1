#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "msrv/errors.hpp"
#include "msrv/estimators.hpp"
#include "msrv/ksum.hpp"
#include "msrv/rng.hpp"
#include "msrv/simulate.hpp"

using namespace msrv;

namespace {

TickSeries series_on_unit_grid(std::vector<double> y) {
    const auto n = y.size() - 1;
    return TickSeries(SamplingGrid::equidistant(n, 1.0), std::move(y));
}

} // namespace

TEST_CASE("rv hand values") {
    CHECK(rv(series_on_unit_grid({0, 1, 0, 1, 0})) == doctest::Approx(4.0));
    CHECK(rv(series_on_unit_grid({2, 2, 2, 2})) == 0.0);

    // single increment: (0, c) → c²
    const std::vector<double> two{0.0, 0.7};
    CHECK(rv(std::span<const double>(two)) == doctest::Approx(0.49).epsilon(1e-15));
    const std::vector<double> one{0.7};
    CHECK_THROWS_AS(rv(std::span<const double>(one)), input_error);
}

TEST_CASE("lag-averaged rv hand values") {
    const auto y = series_on_unit_grid({0, 1, 0, 1, 0});
    CHECK(avg_lag_rv(y, 2) == 0.0);
    CHECK(avg_lag_rv(y, 1) == doctest::Approx(4.0));

    const auto ramp = series_on_unit_grid({0, 1, 2, 3});
    CHECK(avg_lag_rv(ramp, 3) == doctest::Approx(3.0).epsilon(1e-15));

    CHECK_THROWS_AS(avg_lag_rv(y, 5), input_error);
    CHECK_THROWS_AS(avg_lag_rv(y, 0), input_error);
    CHECK(avg_lag_rv(ramp, 2) >= 0.0);
}

TEST_CASE("tsrv hand values") {
    const auto y = series_on_unit_grid({0, 1, 0, 1, 0});
    // K=2, n=4: 0 - 2*(3/8)*4 = -3
    CHECK(tsrv(y, 2) == doctest::Approx(-3.0).epsilon(1e-14));
    CHECK(tsrv(series_on_unit_grid({1, 1, 1, 1, 1}), 2) == 0.0);
    CHECK_THROWS_AS(tsrv(y, 1), std::invalid_argument);
    CHECK_THROWS_AS(tsrv(y, 5), input_error);
}

TEST_CASE("tsrv is centered on pure noise") {
    SimConfig config;
    config.model = ConstantVol{1e-12}; // essentially flat latent path
    config.noise = {NoiseKind::gaussian, 0.01};
    config.n = 1 << 10;
    KahanSum sum, sumsq;
    const int reps = 200;
    for (int r = 0; r < reps; ++r) {
        const auto bundle = gen_path(config, 900 + r);
        const double v = tsrv(bundle.observed_series(), 32);
        sum.add(v);
        sumsq.add(v * v);
    }
    const double mean = sum.value() / reps;
    const double var = sumsq.value() / reps - mean * mean;
    const double se = std::sqrt(var / reps);
    CHECK(std::abs(mean) < 3.0 * se + 1e-10);
}

TEST_CASE("msrv hand values") {
    const auto y = series_on_unit_grid({0, 1, 0, 1, 0});
    WeightScheme scheme;
    scheme.scales = {1, 2, 3};
    scheme.weights = {-0.5, 0.0, 1.5};
    scheme.provenance = WeightProvenance::discrete_optimal;
    scheme.cond1_residual = 0.0;
    scheme.cond2_residual = 0.0;
    CHECK(msrv(y, scheme) == doctest::Approx(-1.0).epsilon(1e-14));

    CHECK(msrv(series_on_unit_grid({3, 3, 3, 3, 3}), scheme) == 0.0);

    // degenerate single-scale diagnostic mode reduces to rv bit for bit
    const auto diag = WeightScheme::diagnostic_single_scale();
    CHECK(msrv(y, diag) == rv(y));

    WeightScheme too_big = scheme;
    too_big.scales = {1, 2, 9};
    CHECK_THROWS_AS(msrv(y, too_big), input_error);

    WeightScheme unbalanced = scheme;
    unbalanced.weights = {-0.5, 0.1, 1.5}; // Σa = 1.1
    unbalanced.cond1_residual = 0.1;
    CHECK_THROWS_AS(msrv(y, unbalanced), std::invalid_argument);
}

TEST_CASE("translation invariance of all estimators") {
    Rng rng(7);
    std::vector<double> y(257);
    for (auto& v : y) v = 0.01 * rng.gaussian();
    const auto base = series_on_unit_grid(y);
    for (auto& v : y) v += 123.456;
    const auto shifted = series_on_unit_grid(y);

    const auto scheme = approxweight_scheme(12);
    CHECK(rv(shifted) == doctest::Approx(rv(base)).epsilon(1e-12));
    CHECK(avg_lag_rv(shifted, 7) == doctest::Approx(avg_lag_rv(base, 7)).epsilon(1e-12));
    CHECK(tsrv(shifted, 8) == doctest::Approx(tsrv(base, 8)).epsilon(1e-12));
    CHECK(msrv(shifted, scheme) == doctest::Approx(msrv(base, scheme)).epsilon(1e-12));
}

TEST_CASE("msrv scale-sum is robust to accumulation order") {
    Rng rng(11);
    std::vector<double> y(4097);
    for (std::size_t i = 1; i < y.size(); ++i)
        y[i] = y[i - 1] + 0.003 * rng.gaussian() + 0.002 * rng.uniform();
    const auto series = series_on_unit_grid(y);
    const auto scheme = h_family_weights(hstar(), 64);

    const double forward = msrv(series, scheme);

    std::vector<std::size_t> order(scheme.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng.engine());
    KahanSum permuted;
    for (std::size_t idx : order)
        permuted.add(scheme.weights[idx] * avg_lag_rv(series, scheme.scales[idx]));

    CHECK(permuted.value() == doctest::Approx(forward).epsilon(1e-12));
}

TEST_CASE("zero-noise consistency of the multi-scale estimator") {
    // No noise, constant σ² = 0.1: the only error is discretization, whose
    // spread at scale count M is sd ≈ sqrt((52/35) η² M/n) per the
    // discretization limit theorem. Bias must vanish and nearly all paths
    // must land inside the 3-sd band.
    SimConfig config;
    config.model = ConstantVol{0.1};
    config.noise = {NoiseKind::none, 0.0};
    config.n = 1 << 12;
    const int m = 64; // ceil(sqrt(n))
    const auto scheme = h_family_weights(hstar(), m);

    const double eta2 = 0.1 * 0.1; // σ⁴ T
    const double sd = std::sqrt((52.0 / 35.0) * eta2 * m / static_cast<double>(config.n));

    const int reps = 100;
    int within = 0;
    KahanSum err;
    for (int r = 0; r < reps; ++r) {
        const auto bundle = gen_path(config, 5000 + r);
        const double e = msrv(bundle.observed_series(), scheme) - bundle.true_qv;
        err.add(e);
        if (std::abs(e) < 3.0 * sd) ++within;
    }
    CHECK(within >= 95);
    CHECK(std::abs(err.value() / reps) < 4.0 * sd / std::sqrt(double(reps)));
}
