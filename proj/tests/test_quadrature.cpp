#include <doctest.h>

#include <cmath>

#include "msrv/errors.hpp"
#include "msrv/quadrature.hpp"

using namespace msrv;

TEST_CASE("gauss-legendre is exact for polynomials up to degree 2k-1") {
    // ∫₀¹ x³ dx = 1/4 with the 2-point rule
    CHECK(quadrature([](double x) { return x * x * x; }, 0.0, 1.0, 2) ==
          doctest::Approx(0.25).epsilon(1e-15));

    // degree-9 polynomial with a 5-point rule: ∫₀¹ x⁹ = 0.1
    CHECK(quadrature([](double x) { return std::pow(x, 9); }, 0.0, 1.0, 5) ==
          doctest::Approx(0.1).epsilon(1e-14));

    // degree-10 with 5 points is no longer exact
    const double approx =
        quadrature([](double x) { return std::pow(x, 10); }, 0.0, 1.0, 5);
    CHECK(std::abs(approx - 1.0 / 11.0) > 1e-12);
}

TEST_CASE("integral conditions of the optimal generator") {
    const auto h = [](double x) { return 12.0 * (x - 0.5); };
    CHECK(quadrature([&](double x) { return x * h(x); }, 0.0, 1.0, 128) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(quadrature(h, 0.0, 1.0, 128) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("transcendental integrand converges") {
    const double value = quadrature([](double x) { return std::exp(x); }, 0.0, 1.0, 32);
    CHECK(value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("lower-triangle double integral") {
    // ∫₀¹dx ∫₀ˣ 1 dy = 1/2 ; ∫₀¹dx ∫₀ˣ x y dy = ∫ x³/2 = 1/8
    CHECK(quadrature_lower_triangle([](double, double) { return 1.0; }, 64) ==
          doctest::Approx(0.5).epsilon(1e-14));
    CHECK(quadrature_lower_triangle([](double x, double y) { return x * y; }, 64) ==
          doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("quadrature rejects bad input") {
    CHECK_THROWS_AS(quadrature([](double x) { return x; }, 1.0, 0.0, 8),
                    std::invalid_argument);
    CHECK_THROWS_AS(quadrature([](double x) { return 1.0 / (x - x); }, 0.0, 1.0, 8),
                    numeric_error);
}
