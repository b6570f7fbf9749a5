#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace fpgadse {

/// Exact arbitrary-precision rational. All energy, time and power quantities
/// are carried in this type so golden values do not drift across platforms.
using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

/// Parses "3", "-0.125", "1.5e-3" or "7/3" exactly. Throws ParseError.
Rational parse_rational(std::string_view text);

/// Exact rendering: terminating decimals as "0.125", everything else as "p/q".
std::string to_exact_string(const Rational& value);

double to_double(const Rational& value);

/// Nearest double rounded to `digits` significant decimal digits (report rendering).
double round_significant(const Rational& value, int digits = 4);

BigInt floor_int(const Rational& value);
BigInt ceil_int(const Rational& value);

/// Integer division rounding to nearest, ties to even.
BigInt div_round_half_even(const BigInt& num, const BigInt& den);

Rational rational_from_double(double value);

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
    return Rational(BigInt(num), BigInt(den));
}

}  // namespace fpgadse
