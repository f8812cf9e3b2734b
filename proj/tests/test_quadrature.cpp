#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "auctionrl/quadrature.hpp"

using auctionrl::integrate;

TEST_CASE("polynomials are integrated to near machine precision") {
    CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) ==
          Catch::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return 3.0 * x * x - 2.0 * x + 1.0; }, -1.0, 2.0) ==
          Catch::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("empty interval integrates to zero") {
    CHECK(integrate([](double x) { return x; }, 0.5, 0.5) == 0.0);
}

TEST_CASE("transcendental integrand") {
    CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, 5.0) ==
          Catch::Approx(1.0 - std::exp(-5.0)).epsilon(1e-10));
}

TEST_CASE("relative tolerance holds on very short intervals") {
    // Denominator-style use: short interval near an endpoint must retain
    // relative accuracy, not just absolute.
    const double a = 2.0 - 1e-6;
    const double got = integrate([](double x) { return (2.0 - x) * (2.0 - x); }, a, 2.0);
    const double exact = std::pow(2.0 - a, 3) / 3.0;
    CHECK(std::abs(got - exact) / exact < 1e-10);
}

TEST_CASE("reversed bounds are rejected") {
    CHECK_THROWS_AS(integrate([](double x) { return x; }, 1.0, 0.0),
                    std::invalid_argument);
}
