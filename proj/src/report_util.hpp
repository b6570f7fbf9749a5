#pragma once

#include "fpgadse/rational.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>

namespace fpgadse::detail {

/// Report rendering: 4 significant digits.
inline nlohmann::json approx(const Rational& value) {
    return round_significant(value, 4);
}

inline nlohmann::json approx(const std::optional<Rational>& value) {
    return value ? approx(*value) : nlohmann::json(nullptr);
}

inline nlohmann::json exact(const std::optional<Rational>& value) {
    return value ? nlohmann::json(to_exact_string(*value)) : nlohmann::json(nullptr);
}

std::string csv_number(const Rational& value);
std::string csv_number(const std::optional<Rational>& value);

}  // namespace fpgadse::detail
