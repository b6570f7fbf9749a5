#include "report_util.hpp"

#include <cstdio>

namespace fpgadse::detail {

std::string csv_number(const Rational& value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", to_double(value));
    return buf;
}

std::string csv_number(const std::optional<Rational>& value) {
    return value ? csv_number(*value) : std::string();
}

}  // namespace fpgadse::detail
