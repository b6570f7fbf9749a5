#include "fpgadse/fixed_point.hpp"

#include "fpgadse/errors.hpp"

#include <cfenv>
#include <cmath>

namespace fpgadse {

std::int64_t FixedPointFormat::quantize(const Rational& x) const {
    BigInt scaled_num = boost::multiprecision::numerator(x) * one_raw();
    BigInt raw = div_round_half_even(scaled_num, boost::multiprecision::denominator(x));
    if (raw < raw_min()) return raw_min();
    if (raw > raw_max()) return raw_max();
    return raw.convert_to<std::int64_t>();
}

std::int64_t FixedPointFormat::quantize(long double x) const {
    // nearbyint honours the current rounding mode; the default is to-nearest-even.
    long double scaled = std::nearbyintl(std::ldexp(x, frac_bits));
    if (scaled < static_cast<long double>(raw_min())) return raw_min();
    if (scaled > static_cast<long double>(raw_max())) return raw_max();
    return static_cast<std::int64_t>(scaled);
}

void FixedPointFormat::validate() const {
    if (total_bits < 4 || total_bits > 32) {
        throw ValidationError("format: total_bits must be in 4..32, got " + std::to_string(total_bits));
    }
    if (frac_bits < 0 || frac_bits >= total_bits) {
        throw ValidationError("format: frac_bits must satisfy 0 <= frac_bits < total_bits, got frac_bits=" +
                              std::to_string(frac_bits) + " total_bits=" + std::to_string(total_bits));
    }
}

}  // namespace fpgadse
