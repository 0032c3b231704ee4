#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sadic/error.hpp"
#include "sadic/laurent.hpp"
#include "sadic/rng.hpp"

using namespace sadic;

TEST_CASE("parse and print") {
    const auto p = parse_polynomial("1 - z");
    CHECK(p.dim() == 1);
    CHECK(p.coefficient({0}) == 1);
    CHECK(p.coefficient({1}) == -1);
    CHECK(p.to_string() == "1 - z");

    const auto q = parse_polynomial("2*z^3 + z^-1");
    CHECK(q.coefficient({3}) == 2);
    CHECK(q.coefficient({-1}) == 1);
    CHECK(q.min_exponent() == Exponent{-1});
    CHECK(parse_polynomial("z^(-1)") == LaurentPolynomial::monomial({-1}));

    const auto r = parse_polynomial("1 - z1*z2");
    CHECK(r.dim() == 2);
    CHECK(r.coefficient({1, 1}) == -1);
    CHECK(parse_polynomial("z", 3).dim() == 3);

    CHECK_THROWS_AS(parse_polynomial("1 + + z"), Error);
    CHECK_THROWS_AS(parse_polynomial("y"), Error);
}

TEST_CASE("arithmetic") {
    const auto a = parse_polynomial("1 - z");
    const auto b = parse_polynomial("1 + z");
    CHECK(a * b == parse_polynomial("1 - z^2"));
    CHECK((a + b) == LaurentPolynomial::constant(1, 2));
    CHECK((a - a).is_zero());
    CHECK(parse_polynomial("z^2").is_monomial());
    CHECK(a.shifted({-3}) == parse_polynomial("z^-3 - z^-2"));
    CHECK(a.shifted({-3}).dense_coefficients_1d() == std::vector<std::int64_t>{1, -1});
}

TEST_CASE("evaluation on the torus") {
    const auto p = parse_polynomial("1 - z");
    const double t[] = {0.25};
    const auto v = p.evaluate(t);
    CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(v.imag() == doctest::Approx(-1.0).epsilon(1e-15));

    Xoshiro256 rng(3);
    const auto q = parse_polynomial("3*z1^2*z2^-1 - z2 + 5");
    for (int k = 0; k < 100; ++k) {
        const double s[] = {rng.uniform(), rng.uniform()};
        const std::complex<double> z[] = {std::polar(1.0, 2 * std::numbers::pi * s[0]),
                                          std::polar(1.0, 2 * std::numbers::pi * s[1])};
        CHECK(std::abs(q.evaluate(s) - q.evaluate_at(z)) < 1e-12);
        const double shifted[] = {s[0] + 3.0, s[1] - 2.0};
        CHECK(std::abs(q.evaluate(s) - q.evaluate(shifted)) < 1e-12);
    }
}
