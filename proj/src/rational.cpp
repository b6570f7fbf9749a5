#include "fpgadse/rational.hpp"

#include "fpgadse/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace fpgadse {

namespace {

BigInt pow10(long exponent) {
    BigInt result = 1;
    for (long i = 0; i < exponent; ++i) {
        result *= 10;
    }
    return result;
}

bool all_digits(std::string_view s) {
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            return false;
        }
    }
    return true;
}

[[noreturn]] void bad_number(std::string_view text) {
    throw ParseError("not a rational number: '" + std::string(text) + "'");
}

}  // namespace

Rational parse_rational(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.empty()) {
        bad_number(text);
    }

    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        Rational num = parse_rational(s.substr(0, slash));
        Rational den = parse_rational(s.substr(slash + 1));
        if (den == 0) {
            throw ParseError("zero denominator in '" + std::string(text) + "'");
        }
        return num / den;
    }

    bool negative = false;
    if (s.front() == '+' || s.front() == '-') {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }

    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        std::string_view exp_part = s.substr(e + 1);
        bool exp_negative = false;
        if (!exp_part.empty() && (exp_part.front() == '+' || exp_part.front() == '-')) {
            exp_negative = exp_part.front() == '-';
            exp_part.remove_prefix(1);
        }
        if (!all_digits(exp_part) || exp_part.size() > 6) {
            bad_number(text);
        }
        exponent = std::strtol(std::string(exp_part).c_str(), nullptr, 10);
        if (exp_negative) exponent = -exponent;
        s = s.substr(0, e);
    }

    std::string_view int_part = s;
    std::string_view frac_part;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        int_part = s.substr(0, dot);
        frac_part = s.substr(dot + 1);
    }
    if (int_part.empty() && frac_part.empty()) bad_number(text);
    if (!int_part.empty() && !all_digits(int_part)) bad_number(text);
    if (!frac_part.empty() && !all_digits(frac_part)) bad_number(text);

    std::string all = std::string(int_part) + std::string(frac_part);
    all.erase(0, std::min(all.find_first_not_of('0'), all.size()));
    BigInt digits(all.empty() ? std::string("0") : all);
    long scale = static_cast<long>(frac_part.size()) - exponent;
    Rational value = scale >= 0 ? Rational(digits, pow10(scale)) : Rational(digits * pow10(-scale));
    return negative ? Rational(-value) : value;
}

std::string to_exact_string(const Rational& value) {
    BigInt num = boost::multiprecision::numerator(value);
    BigInt den = boost::multiprecision::denominator(value);
    if (den == 1) {
        return num.str();
    }
    BigInt rest = den;
    long twos = 0;
    long fives = 0;
    while (rest % 2 == 0) {
        rest /= 2;
        ++twos;
    }
    while (rest % 5 == 0) {
        rest /= 5;
        ++fives;
    }
    if (rest != 1) {
        return num.str() + "/" + den.str();
    }
    long places = std::max(twos, fives);
    BigInt scaled = num * pow10(places) / den;
    bool negative = scaled < 0;
    std::string digits = (negative ? BigInt(-scaled) : scaled).str();
    if (static_cast<long>(digits.size()) <= places) {
        digits.insert(0, static_cast<std::size_t>(places) - digits.size() + 1, '0');
    }
    digits.insert(digits.size() - static_cast<std::size_t>(places), ".");
    return negative ? "-" + digits : digits;
}

double to_double(const Rational& value) {
    return value.convert_to<double>();
}

double round_significant(const Rational& value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, to_double(value));
    return std::strtod(buf, nullptr);
}

BigInt floor_int(const Rational& value) {
    BigInt num = boost::multiprecision::numerator(value);
    BigInt den = boost::multiprecision::denominator(value);
    BigInt q = num / den;
    if (num % den != 0 && num < 0) {
        q -= 1;
    }
    return q;
}

BigInt ceil_int(const Rational& value) {
    return -floor_int(Rational(-value));
}

BigInt div_round_half_even(const BigInt& num, const BigInt& den) {
    Rational exact(num, den);
    BigInt lower = floor_int(exact);
    Rational diff = exact - Rational(lower);
    Rational half(1, 2);
    if (diff > half) return lower + 1;
    if (diff < half) return lower;
    return (lower % 2 == 0) ? lower : BigInt(lower + 1);
}

Rational rational_from_double(double value) {
    if (!std::isfinite(value)) {
        throw DomainError("non-finite value cannot be represented exactly");
    }
    int exponent = 0;
    double mantissa = std::frexp(value, &exponent);
    // 53-bit mantissa scaled to an integer.
    auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
    exponent -= 53;
    Rational result{BigInt(scaled)};
    BigInt two_pow = 1;
    for (int i = 0; i < std::abs(exponent); ++i) two_pow *= 2;
    return exponent >= 0 ? Rational(result * two_pow) : Rational(result / two_pow);
}

}  // namespace fpgadse
