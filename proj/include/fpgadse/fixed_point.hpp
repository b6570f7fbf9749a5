#pragma once

#include "fpgadse/rational.hpp"

#include <cstdint>

namespace fpgadse {

/// Binary fixed-point format. Quantization is round-to-nearest-even with
/// saturation at the representable range.
struct FixedPointFormat {
    int total_bits = 16;
    int frac_bits = 8;
    bool is_signed = true;

    std::int64_t raw_min() const noexcept {
        return is_signed ? -(std::int64_t{1} << (total_bits - 1)) : 0;
    }
    std::int64_t raw_max() const noexcept {
        return is_signed ? (std::int64_t{1} << (total_bits - 1)) - 1 : (std::int64_t{1} << total_bits) - 1;
    }
    std::int64_t one_raw() const noexcept { return std::int64_t{1} << frac_bits; }

    Rational value(std::int64_t raw) const { return Rational(BigInt(raw), BigInt(one_raw())); }
    Rational min_value() const { return value(raw_min()); }
    Rational max_value() const { return value(raw_max()); }

    std::int64_t saturate(std::int64_t raw) const noexcept {
        return raw < raw_min() ? raw_min() : (raw > raw_max() ? raw_max() : raw);
    }
    std::int64_t quantize(const Rational& x) const;
    std::int64_t quantize(long double x) const;

    /// Throws ValidationError when the bit counts are out of range.
    void validate() const;

    friend bool operator==(const FixedPointFormat&, const FixedPointFormat&) = default;
};

/// Floor division for signed 64-bit integers.
inline std::int64_t floor_div(std::int64_t num, std::int64_t den) noexcept {
    std::int64_t q = num / den;
    std::int64_t r = num % den;
    return (r != 0 && ((r < 0) != (den < 0))) ? q - 1 : q;
}

/// Round-half-even division for signed 64-bit integers, den > 0.
inline std::int64_t div_rne(std::int64_t num, std::int64_t den) noexcept {
    std::int64_t q = floor_div(num, den);
    std::int64_t twice_rem = 2 * (num - q * den);
    if (twice_rem > den || (twice_rem == den && (q & 1) != 0)) {
        ++q;
    }
    return q;
}

}  // namespace fpgadse
