#include <doctest.h>

#include <cmath>
#include <vector>

#include "msrv/grid.hpp"
#include "msrv/simulate.hpp"

using namespace msrv;

TEST_CASE("grid construction invariants") {
    CHECK_THROWS_AS(SamplingGrid({0.0, 1.0}), std::invalid_argument);       // n = 1
    CHECK_THROWS_AS(SamplingGrid({0.1, 0.5, 1.0}), std::invalid_argument);  // t0 != 0
    CHECK_THROWS_AS(SamplingGrid({0.0, 0.5, 0.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(SamplingGrid({0.0, 0.6, 0.5, 1.0}), std::invalid_argument);

    const auto grid = SamplingGrid::equidistant(4, 1.0);
    CHECK(grid.n() == 4);
    CHECK(grid.horizon() == 1.0);
    CHECK_FALSE(grid.gap_bound_exceeded());

    // one huge gap beyond factor*T/n only warns
    std::vector<double> times{0.0};
    for (int i = 1; i <= 200; ++i) times.push_back(i * 1e-3);
    times.push_back(1.0);  // gap of 0.8 vs T/n ≈ 5e-3
    const SamplingGrid gappy(std::move(times));
    CHECK(gappy.gap_bound_exceeded());
}

TEST_CASE("empirical aqvt hand values") {
    const auto eq = SamplingGrid::equidistant(4, 1.0);
    CHECK(empirical_aqvt(eq, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(empirical_aqvt(eq, 0.5) == doctest::Approx(0.5).epsilon(1e-15));

    const SamplingGrid irregular({0.0, 0.5, 0.75, 1.0});
    CHECK(empirical_aqvt(irregular, 1.0) == doctest::Approx(1.125).epsilon(1e-15));

    CHECK_THROWS_AS(empirical_aqvt(eq, -0.1), std::domain_error);
    CHECK_THROWS_AS(empirical_aqvt(eq, 1.1), std::domain_error);
}

TEST_CASE("empirical aqvt is nondecreasing in t") {
    const SamplingGrid grid({0.0, 0.05, 0.2, 0.35, 0.6, 0.62, 0.9, 1.0});
    double prev = -1.0;
    for (double t = 0.0; t <= 1.0; t += 0.01) {
        const double h = empirical_aqvt(grid, t);
        CHECK(h >= prev);
        prev = h;
    }
    CHECK(empirical_aqvt(grid, 0.0) == 0.0);
}

TEST_CASE("aqvt derivative on an equidistant grid is exactly one") {
    const auto grid = SamplingGrid::equidistant(100, 1.0);
    const auto curve = aqvt_derivative(grid, 0.1);  // b = T/10, grid-aligned
    REQUIRE(curve.points.size() == 101);
    for (double d : curve.derivative) CHECK(d == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(curve.nonpositive_derivative);
    CHECK(curve.values.front() == 0.0);
}

TEST_CASE("aqvt derivative rejects degenerate input") {
    const auto grid = SamplingGrid::equidistant(100, 1.0);
    CHECK_THROWS_AS(aqvt_derivative(grid, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(aqvt_derivative(grid, 0.6), std::invalid_argument);
    CHECK_THROWS_AS(aqvt_derivative(SamplingGrid({0.0, 0.4, 1.0}), 0.2),
                    std::invalid_argument);  // n=2: too few points
}

TEST_CASE("time change examples") {
    const auto eq = SamplingGrid::equidistant(4, 1.0);

    const auto same = time_change(eq, [](double t) { return t; });
    for (std::size_t i = 0; i <= 4; ++i)
        CHECK(same.times()[i] == doctest::Approx(eq.times()[i]).epsilon(1e-15));

    const auto squared = time_change(eq, [](double t) { return t * t; });
    const std::vector<double> expected{0.0, 1.0 / 16, 0.25, 9.0 / 16, 1.0};
    for (std::size_t i = 0; i <= 4; ++i)
        CHECK(squared.times()[i] == doctest::Approx(expected[i]).epsilon(1e-15));

    // sqrt then square round-trips
    const auto root = time_change(eq, [](double t) { return std::sqrt(t); });
    const auto back = time_change(root, [](double t) { return t * t; });
    for (std::size_t i = 0; i <= 4; ++i)
        CHECK(back.times()[i] == doctest::Approx(eq.times()[i]).epsilon(1e-12));

    CHECK_THROWS_AS(time_change(eq, [](double t) { return -t; }), std::invalid_argument);
    CHECK_THROWS_AS(time_change(eq, [](double t) { return 0.5 * t; }),
                    std::invalid_argument);  // g(T) != T
}

TEST_CASE("equidistance defect") {
    CHECK(equidistance_defect(SamplingGrid::equidistant(64, 1.0)) == 0.0);

    const SamplingGrid irregular({0.0, 0.5, 0.75, 1.0});
    const double expected = 1.0 / 36 + 1.0 / 144 + 1.0 / 144;
    CHECK(equidistance_defect(irregular) == doctest::Approx(expected).epsilon(1e-14));

    CHECK(equidistance_defect(time_change(SamplingGrid::equidistant(8, 1.0),
                                          [](double t) { return t; })) == 0.0);
}

TEST_CASE("defect of a smooth non-linear time change scales like 1/n") {
    // t_i = G(i T/n) with G(t) = (t + t²)/2
    std::vector<double> ns, defects;
    for (int p = 8; p <= 14; p += 2) {
        const std::size_t n = std::size_t{1} << p;
        const auto grid = time_change(SamplingGrid::equidistant(n, 1.0),
                                      [](double t) { return 0.5 * (t + t * t); });
        ns.push_back(static_cast<double>(n));
        defects.push_back(equidistance_defect(grid));
    }
    const double slope = loglog_slope(ns, defects);
    CHECK(slope == doctest::Approx(-1.0).epsilon(0.05));
}

TEST_CASE("change-of-variable identity H'(t) g'(t) = K'(g(t))") {
    // g(t) = t² on an equidistant grid at n = 2^12, tolerance 5e-2
    const std::size_t n = 1 << 12;
    const auto base = SamplingGrid::equidistant(n, 1.0);
    const auto mapped = time_change(base, [](double t) { return t * t; });

    const auto h_curve = aqvt_derivative(base, default_aqvt_bandwidth(base));
    const auto k_curve = aqvt_derivative(mapped, default_aqvt_bandwidth(mapped));

    for (double t : {0.3, 0.5, 0.7, 0.9}) {
        const double lhs = 2.0 * t;  // H' = 1 on the base grid, g' = 2t
        // locate g(t) among the mapped evaluation points
        const double u = t * t;
        std::size_t j = 0;
        while (j + 1 < k_curve.points.size() && k_curve.points[j + 1] <= u) ++j;
        const double rhs = k_curve.derivative[j];
        CHECK(rhs == doctest::Approx(lhs).epsilon(5e-2));
        // and H' itself is 1 at interior points
        const std::size_t i = static_cast<std::size_t>(t * n);
        CHECK(h_curve.derivative[i] == doctest::Approx(1.0).epsilon(1e-6));
    }
}
