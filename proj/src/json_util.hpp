#pragma once

// Strict JSON object reading shared by the file loaders.

#include "fpgadse/errors.hpp"
#include "fpgadse/rational.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>

namespace fpgadse::detail {

using nlohmann::json;

Rational rational_from_json(const json& value, const std::string& where);
json rational_to_json(const Rational& value);

std::string read_text_file(const std::filesystem::path& path);
json parse_json_text(std::string_view text, const std::string& what);

/// Reads fields of one JSON object and rejects any field that was never asked for.
class ObjectReader {
public:
    ObjectReader(const json& object, std::string context);

    bool has(const std::string& key) const { return object_.contains(key); }

    const json& raw(const std::string& key);
    const json* raw_optional(const std::string& key);

    std::string string(const std::string& key);
    std::int64_t integer(const std::string& key);
    bool boolean(const std::string& key);
    Rational rational(const std::string& key);
    std::optional<Rational> optional_rational(const std::string& key);
    std::optional<std::string> optional_string(const std::string& key);

    const std::string& context() const noexcept { return context_; }
    std::string where(const std::string& key) const { return context_ + "." + key; }

    /// Throws ValidationError naming the first unknown field.
    void finish() const;

private:
    const json& object_;
    std::string context_;
    std::set<std::string> seen_;
};

}  // namespace fpgadse::detail
