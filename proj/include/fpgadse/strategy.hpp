#pragma once

#include "fpgadse/rational.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <string_view>
#include <variant>

namespace fpgadse {

/// Declaration order is the tie-break order used by the generator.
enum class StrategyType { OnOff, IdleWaiting, ClockAligned, Adaptive };

struct PredefinedThreshold {
    Rational theta;  // ms
    friend bool operator==(const PredefinedThreshold&, const PredefinedThreshold&) = default;
};

struct LearnableThreshold {
    Rational theta0;  // ms
    Rational eta;     // in (0, 1]
    friend bool operator==(const LearnableThreshold&, const LearnableThreshold&) = default;
};

using ThresholdPolicy = std::variant<PredefinedThreshold, LearnableThreshold>;

/// Duty-cycle strategy. `threshold` is only meaningful for Adaptive.
struct StrategyKind {
    StrategyType type = StrategyType::IdleWaiting;
    ThresholdPolicy threshold = PredefinedThreshold{Rational(1)};

    static StrategyKind on_off() { return {StrategyType::OnOff, PredefinedThreshold{Rational(1)}}; }
    static StrategyKind idle_waiting() { return {StrategyType::IdleWaiting, PredefinedThreshold{Rational(1)}}; }
    static StrategyKind clock_aligned() { return {StrategyType::ClockAligned, PredefinedThreshold{Rational(1)}}; }
    static StrategyKind adaptive_predefined(Rational theta) {
        return {StrategyType::Adaptive, PredefinedThreshold{std::move(theta)}};
    }
    static StrategyKind adaptive_learnable(Rational theta0, Rational eta) {
        return {StrategyType::Adaptive, LearnableThreshold{std::move(theta0), std::move(eta)}};
    }

    bool is_learnable() const noexcept {
        return type == StrategyType::Adaptive && std::holds_alternative<LearnableThreshold>(threshold);
    }

    friend bool operator==(const StrategyKind& a, const StrategyKind& b) {
        if (a.type != b.type) return false;
        return a.type != StrategyType::Adaptive || a.threshold == b.threshold;
    }
};

/// Default adaptive policy used when none is given explicitly.
StrategyKind default_adaptive();

/// Throws ValidationError when theta/theta0 <= 0 or eta is outside (0, 1].
void validate(const StrategyKind& strategy);

/// "OnOff", "IdleWaiting", "ClockAligned", "Adaptive(Predefined,theta=30)", ...
std::string to_string(const StrategyKind& strategy);
std::string_view to_string(StrategyType type) noexcept;

/// Accepts onoff | idle | clock | adaptive | adaptive:predefined:THETA |
/// adaptive:learnable:THETA0[:ETA], and the canonical names (OnOff, ...).
StrategyKind parse_strategy(std::string_view text);

nlohmann::json to_json(const StrategyKind& strategy);

}  // namespace fpgadse
