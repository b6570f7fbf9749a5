#include "fpgadse/activation.hpp"

#include "fpgadse/errors.hpp"

#include <algorithm>
#include <cmath>

namespace fpgadse {

namespace {

long double real_activation(ActivationFn fn, long double x) {
    switch (fn) {
        case ActivationFn::Sigmoid:
            return 1.0L / (1.0L + std::exp(-x));
        case ActivationFn::Tanh:
            return std::tanh(x);
        case ActivationFn::HardSigmoid:
            return std::clamp(x / 6.0L + 0.5L, 0.0L, 1.0L);
        case ActivationFn::HardTanh:
            return std::clamp(x, -1.0L, 1.0L);
    }
    return 0.0L;
}

bool is_piecewise_linear(ActivationFn fn) {
    return fn == ActivationFn::HardSigmoid || fn == ActivationFn::HardTanh;
}

}  // namespace

double reference_activation(ActivationFn fn, double x) {
    return static_cast<double>(real_activation(fn, x));
}

std::optional<Rational> exact_activation(ActivationFn fn, const Rational& x) {
    const Rational zero(0), one(1);
    switch (fn) {
        case ActivationFn::HardSigmoid: {
            Rational y = x / 6 + Rational(1, 2);
            return y < zero ? zero : (y > one ? one : y);
        }
        case ActivationFn::HardTanh:
            return x < -one ? Rational(-one) : (x > one ? one : x);
        default:
            return std::nullopt;
    }
}

std::int64_t fixed_point_definition(ActivationFn fn, const FixedPointFormat& format, std::int64_t raw_input) {
    if (auto exact = exact_activation(fn, format.value(raw_input))) {
        return format.quantize(*exact);
    }
    long double x = std::ldexp(static_cast<long double>(raw_input), -format.frac_bits);
    return format.quantize(real_activation(fn, x));
}

ActivationDatapath::ActivationDatapath(ActivationFn fn, FixedPointFormat format) : fn_(fn), format_(format) {
    format_.validate();
    if (is_piecewise_linear(fn_)) {
        return;
    }
    // Sigmoid: samples at -8 + k, Tanh: samples at -4 + k/2.
    step_shift_ = fn_ == ActivationFn::Sigmoid ? 0 : 1;
    first_over_step_ = 8;
    table_.reserve(kTableEntries);
    for (int k = 0; k < kTableEntries; ++k) {
        long double x = std::ldexp(static_cast<long double>(k - first_over_step_), -step_shift_);
        table_.push_back(format_.quantize(real_activation(fn_, x)));
    }
}

std::int64_t ActivationDatapath::evaluate(std::int64_t raw) const {
    const std::int64_t one = format_.one_raw();
    switch (fn_) {
        case ActivationFn::HardTanh:
            return format_.saturate(std::clamp(raw, -one, one));
        case ActivationFn::HardSigmoid:
            // x/6 + 1/2 in raw units is (raw + 3 * one) / 6.
            return format_.saturate(std::clamp(div_rne(raw + 3 * one, 6), std::int64_t{0}, one));
        default:
            return evaluate_table(raw);
    }
}

std::int64_t ActivationDatapath::evaluate_table(std::int64_t raw) const {
    // Position in table steps: u = x / step + first_over_step = (raw * 2^s + first * 2^f) / 2^f.
    const std::int64_t den = format_.one_raw();
    const std::int64_t num = raw * (std::int64_t{1} << step_shift_) + first_over_step_ * den;
    const std::int64_t k = floor_div(num, den);
    if (k < 0) {
        return table_.front();
    }
    if (k >= kTableEntries - 1) {
        return table_.back();
    }
    const std::int64_t rem = num - k * den;
    const std::int64_t lo = table_[static_cast<std::size_t>(k)];
    const std::int64_t hi = table_[static_cast<std::size_t>(k + 1)];
    return format_.saturate(lo + div_rne((hi - lo) * rem, den));
}

ErrorStats precision_error_sweep(const TemplateProfile& variant, ErrorReference reference) {
    if (variant.kind != TemplateKind::Activation || !variant.activation_fn) {
        throw UnsupportedKind("precision sweep needs an Activation profile, got '" + variant.variant_id + "' (" +
                              std::string(to_string(variant.kind)) + ")");
    }
    const FixedPointFormat& fmt = variant.format;
    fmt.validate();
    if (fmt.total_bits > kMaxSweepBits) {
        throw SweepTooLarge("exhaustive sweep limited to " + std::to_string(kMaxSweepBits) + " bits, '" +
                            variant.variant_id + "' has " + std::to_string(fmt.total_bits));
    }
    const ActivationFn fn = *variant.activation_fn;
    const ActivationDatapath datapath(fn, fmt);

    ErrorStats stats;
    stats.inputs = fmt.raw_max() - fmt.raw_min() + 1;
    stats.worst_raw_input = fmt.raw_min();

    const bool integer_errors = reference == ErrorReference::FixedPointDefinition || is_piecewise_linear(fn);
    if (integer_errors) {
        // Errors are exact multiples of 1 / (6 * 2^f) for every case handled here.
        const std::int64_t scale = 6;
        std::int64_t max_err = -1;
        std::int64_t sum_err = 0;
        for (std::int64_t raw = fmt.raw_min(); raw <= fmt.raw_max(); ++raw) {
            const std::int64_t hw = datapath.evaluate(raw) * scale;
            std::int64_t ref = 0;
            if (reference == ErrorReference::FixedPointDefinition) {
                ref = fixed_point_definition(fn, fmt, raw) * scale;
            } else if (fn == ActivationFn::HardTanh) {
                ref = std::clamp(raw, -fmt.one_raw(), fmt.one_raw()) * scale;
            } else {
                ref = std::clamp(raw + 3 * fmt.one_raw(), std::int64_t{0}, scale * fmt.one_raw());
            }
            const std::int64_t err = hw > ref ? hw - ref : ref - hw;
            sum_err += err;
            if (err > max_err) {
                max_err = err;
                stats.worst_raw_input = raw;
            }
        }
        const BigInt den = BigInt(scale) * fmt.one_raw();
        stats.max_abs_error = Rational(BigInt(max_err), den);
        stats.mean_abs_error = Rational(BigInt(sum_err), den * stats.inputs);
        return stats;
    }

    // Irrational reference: errors evaluated in extended precision, then made exact.
    long double max_err = -1.0L;
    long double sum_err = 0.0L;
    long double compensation = 0.0L;
    for (std::int64_t raw = fmt.raw_min(); raw <= fmt.raw_max(); ++raw) {
        const long double hw = std::ldexp(static_cast<long double>(datapath.evaluate(raw)), -fmt.frac_bits);
        const long double x = std::ldexp(static_cast<long double>(raw), -fmt.frac_bits);
        const long double err = std::fabs(hw - real_activation(fn, x));
        const long double y = err - compensation;
        const long double t = sum_err + y;
        compensation = (t - sum_err) - y;
        sum_err = t;
        if (err > max_err) {
            max_err = err;
            stats.worst_raw_input = raw;
        }
    }
    stats.max_abs_error = rational_from_double(static_cast<double>(max_err));
    stats.mean_abs_error = rational_from_double(static_cast<double>(sum_err / static_cast<long double>(stats.inputs)));
    return stats;
}

}  // namespace fpgadse
