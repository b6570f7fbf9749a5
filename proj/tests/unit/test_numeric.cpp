#include "fpgadse/errors.hpp"
#include "fpgadse/fixed_point.hpp"
#include "fpgadse/rational.hpp"

#include <doctest.h>

#include <random>

using namespace fpgadse;

TEST_CASE("parse_rational is exact") {
    CHECK(parse_rational("3") == 3);
    CHECK(parse_rational("-0.125") == Rational(-1, 8));
    CHECK(parse_rational("1.5e-3") == Rational(3, 2000));
    CHECK(parse_rational("7/3") == Rational(7, 3));
    CHECK(parse_rational("0.0039") == Rational(39, 10000));
    CHECK(parse_rational("008") == 8);
    CHECK(parse_rational(".5") == Rational(1, 2));
    CHECK_THROWS_AS(parse_rational("abc"), ParseError);
    CHECK_THROWS_AS(parse_rational(""), ParseError);
    CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
}

TEST_CASE("exact rendering") {
    CHECK(to_exact_string(Rational(1, 8)) == "0.125");
    CHECK(to_exact_string(Rational(-5, 2)) == "-2.5");
    CHECK(to_exact_string(Rational(1, 3)) == "1/3");
    CHECK(to_exact_string(Rational(42)) == "42");
}

TEST_CASE("round_significant keeps four digits") {
    CHECK(round_significant(Rational(1298, 557)) == doctest::Approx(2.330).epsilon(1e-12));
    CHECK(round_significant(Rational(504, 100)) == 5.04);
    CHECK(round_significant(Rational(0)) == 0.0);
}

TEST_CASE("half-even division matches a brute-force oracle") {
    std::mt19937_64 gen(11);
    std::uniform_int_distribution<std::int64_t> num(-5000, 5000), den(1, 37);
    for (int i = 0; i < 20000; ++i) {
        const std::int64_t n = num(gen), d = den(gen);
        const Rational q{BigInt(n), BigInt(d)};
        const BigInt lo = floor_int(q);
        const Rational frac = q - Rational(lo);
        BigInt want = lo;
        if (frac > Rational(1, 2) || (frac == Rational(1, 2) && lo % 2 != 0)) want = lo + 1;
        REQUIRE(div_rne(n, d) == want.convert_to<std::int64_t>());
        REQUIRE(div_round_half_even(BigInt(n), BigInt(d)) == want);
    }
}

TEST_CASE("fixed-point range and quantization") {
    const FixedPointFormat q44{8, 4, true};
    CHECK(q44.min_value() == -8);
    CHECK(q44.max_value() == Rational(127, 16));
    CHECK(q44.quantize(Rational(1, 32)) == 0);  // tie to even
    CHECK(q44.quantize(Rational(3, 32)) == 2);
    CHECK(q44.quantize(Rational(100)) == 127);
    CHECK(q44.quantize(Rational(-100)) == -128);
    CHECK(q44.quantize(0.15625L) == 2);
    CHECK_THROWS_AS((FixedPointFormat{8, 8, true}.validate()), ValidationError);
    CHECK_THROWS_AS((FixedPointFormat{3, 0, true}.validate()), ValidationError);
    CHECK_THROWS_AS((FixedPointFormat{33, 0, true}.validate()), ValidationError);
    CHECK_NOTHROW((FixedPointFormat{32, 31, true}.validate()));
}
