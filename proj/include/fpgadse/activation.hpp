#pragma once

#include "fpgadse/catalog.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace fpgadse {

/// Real-valued activation: Sigmoid, Tanh, clamp(x/6 + 1/2, 0, 1), clamp(x, -1, 1).
double reference_activation(ActivationFn fn, double x);

/// Exact value of the piecewise-linear activations; nullopt for Sigmoid/Tanh.
std::optional<Rational> exact_activation(ActivationFn fn, const Rational& x);

/// Integer datapath of an activation template, input and output in `format`.
///
/// HardSigmoid and HardTanh are computed directly on raw integers. Sigmoid and
/// Tanh use a 16-entry table of quantized samples with linear interpolation
/// between neighbouring entries: Sigmoid samples x = -8, -7, ..., 7 and Tanh
/// samples x = -4, -3.5, ..., 3.5. Inputs below the first sample return the
/// first entry, inputs at or above the last sample return the last entry.
class ActivationDatapath {
public:
    ActivationDatapath(ActivationFn fn, FixedPointFormat format);

    std::int64_t evaluate(std::int64_t raw_input) const;

    ActivationFn function() const noexcept { return fn_; }
    const FixedPointFormat& format() const noexcept { return format_; }
    std::span<const std::int64_t> table() const noexcept { return table_; }

    static constexpr int kTableEntries = 16;

private:
    std::int64_t evaluate_table(std::int64_t raw_input) const;

    ActivationFn fn_;
    FixedPointFormat format_;
    std::vector<std::int64_t> table_;
    // First sample and spacing are -first_over_step * step and 2^-step_shift.
    std::int64_t first_over_step_ = 0;
    int step_shift_ = 0;
};

/// The fixed-point software definition: exact (or real) function value
/// quantized with round-to-nearest-even and saturation.
std::int64_t fixed_point_definition(ActivationFn fn, const FixedPointFormat& format, std::int64_t raw_input);

enum class ErrorReference { RealValued, FixedPointDefinition };

struct ErrorStats {
    Rational max_abs_error;
    Rational mean_abs_error;
    std::int64_t inputs = 0;
    std::int64_t worst_raw_input = 0;

    friend bool operator==(const ErrorStats&, const ErrorStats&) = default;
};

inline constexpr int kMaxSweepBits = 20;

/// Evaluates the template's datapath on every representable input.
/// Throws UnsupportedKind for non-activation profiles and SweepTooLarge above 20 bits.
ErrorStats precision_error_sweep(const TemplateProfile& variant, ErrorReference reference);

}  // namespace fpgadse
