#pragma once

#include "fpgadse/fixed_point.hpp"
#include "fpgadse/rational.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fpgadse {

enum class TemplateKind { LSTMCell, Conv, FullyConnected, Attention, Activation };
enum class ActivationFn { Sigmoid, Tanh, HardSigmoid, HardTanh };

std::string_view to_string(TemplateKind kind) noexcept;
std::string_view to_string(ActivationFn fn) noexcept;
TemplateKind parse_template_kind(std::string_view text);
ActivationFn parse_activation_fn(std::string_view text);

struct Resources {
    std::int64_t lut = 0;
    std::int64_t ff = 0;
    std::int64_t dsp = 0;
    std::int64_t bram = 0;

    Resources& operator+=(const Resources& other) noexcept {
        lut += other.lut;
        ff += other.ff;
        dsp += other.dsp;
        bram += other.bram;
        return *this;
    }
    friend Resources operator+(Resources a, const Resources& b) noexcept { return a += b; }
    friend bool operator==(const Resources&, const Resources&) = default;

    /// Component-wise <=.
    bool fits_within(const Resources& capacity) const noexcept {
        return lut <= capacity.lut && ff <= capacity.ff && dsp <= capacity.dsp && bram <= capacity.bram;
    }
};

/// Performance profile of one hardware template variant.
struct TemplateProfile {
    TemplateKind kind = TemplateKind::FullyConnected;
    std::string variant_id;
    std::optional<ActivationFn> activation_fn;
    std::int64_t latency_base_cycles = 0;
    Rational latency_cycles_per_unit;
    Resources resources;
    Rational dyn_power_coeff;  // mW per MHz
    Rational f_max;            // MHz
    FixedPointFormat format;
    std::optional<Rational> max_abs_error;

    /// base + ceil(per_unit * work_units), in clock cycles.
    std::int64_t latency(std::int64_t work_units) const;

    friend bool operator==(const TemplateProfile&, const TemplateProfile&) = default;
};

struct Catalog {
    std::string version;
    std::vector<TemplateProfile> profiles;

    const TemplateProfile* find(TemplateKind kind, std::string_view variant_id) const noexcept;
    /// First profile of any kind with this id; ids are unique per kind only.
    const TemplateProfile* find_any(std::string_view variant_id) const noexcept;

    friend bool operator==(const Catalog&, const Catalog&) = default;
};

/// Checks every profile invariant and (kind, variant_id) uniqueness.
void validate(const Catalog& catalog);

Catalog parse_catalog(const nlohmann::json& doc);
Catalog parse_catalog_text(std::string_view text);
Catalog load_catalog(const std::filesystem::path& path);

nlohmann::json to_json(const TemplateProfile& profile);
nlohmann::json to_json(const Catalog& catalog);

}  // namespace fpgadse
