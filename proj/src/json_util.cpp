#include "json_util.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace fpgadse::detail {

Rational rational_from_json(const json& value, const std::string& where) {
    try {
        if (value.is_string()) {
            return parse_rational(value.get<std::string>());
        }
        if (value.is_number_integer()) {
            return Rational(BigInt(value.get<std::int64_t>()));
        }
        if (value.is_number_float()) {
            // Shortest round-trip text matches the literal in the input file.
            char buf[64];
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value.get<double>());
            if (ec != std::errc{}) {
                throw ParseError("unrepresentable number");
            }
            return parse_rational(std::string_view(buf, static_cast<std::size_t>(end - buf)));
        }
    } catch (const ParseError& e) {
        throw ValidationError(where + ": " + e.what());
    }
    throw ValidationError(where + ": expected a number or decimal string");
}

json rational_to_json(const Rational& value) {
    if (boost::multiprecision::denominator(value) == 1) {
        BigInt num = boost::multiprecision::numerator(value);
        if (num >= std::numeric_limits<std::int64_t>::min() && num <= std::numeric_limits<std::int64_t>::max()) {
            return num.convert_to<std::int64_t>();
        }
    }
    return to_exact_string(value);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open file: " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

json parse_json_text(std::string_view text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(what + ": " + e.what());
    }
}

ObjectReader::ObjectReader(const json& object, std::string context)
    : object_(object), context_(std::move(context)) {
    if (!object_.is_object()) {
        throw ValidationError(context_ + ": expected an object");
    }
}

const json& ObjectReader::raw(const std::string& key) {
    auto it = object_.find(key);
    if (it == object_.end()) {
        throw ValidationError(where(key) + ": required field missing");
    }
    seen_.insert(key);
    return *it;
}

const json* ObjectReader::raw_optional(const std::string& key) {
    auto it = object_.find(key);
    if (it == object_.end() || it->is_null()) {
        seen_.insert(key);
        return nullptr;
    }
    seen_.insert(key);
    return &*it;
}

std::string ObjectReader::string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) {
        throw ValidationError(where(key) + ": expected a string");
    }
    return v.get<std::string>();
}

std::int64_t ObjectReader::integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) {
        throw ValidationError(where(key) + ": expected an integer");
    }
    return v.get<std::int64_t>();
}

bool ObjectReader::boolean(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_boolean()) {
        throw ValidationError(where(key) + ": expected true or false");
    }
    return v.get<bool>();
}

Rational ObjectReader::rational(const std::string& key) {
    return rational_from_json(raw(key), where(key));
}

std::optional<Rational> ObjectReader::optional_rational(const std::string& key) {
    const json* v = raw_optional(key);
    if (v == nullptr) return std::nullopt;
    return rational_from_json(*v, where(key));
}

std::optional<std::string> ObjectReader::optional_string(const std::string& key) {
    const json* v = raw_optional(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_string()) {
        throw ValidationError(where(key) + ": expected a string");
    }
    return v->get<std::string>();
}

void ObjectReader::finish() const {
    for (const auto& item : object_.items()) {
        if (!seen_.contains(item.key())) {
            throw ValidationError(where(item.key()) + ": unknown field");
        }
    }
}

}  // namespace fpgadse::detail
