#include "fpgadse/catalog.hpp"

#include "fpgadse/errors.hpp"
#include "json_util.hpp"

#include <array>
#include <set>
#include <utility>

namespace fpgadse {

using detail::json;
using detail::ObjectReader;

namespace {

constexpr std::array<std::pair<TemplateKind, std::string_view>, 5> kKindNames{{
    {TemplateKind::LSTMCell, "LSTMCell"},
    {TemplateKind::Conv, "Conv"},
    {TemplateKind::FullyConnected, "FullyConnected"},
    {TemplateKind::Attention, "Attention"},
    {TemplateKind::Activation, "Activation"},
}};

constexpr std::array<std::pair<ActivationFn, std::string_view>, 4> kActivationNames{{
    {ActivationFn::Sigmoid, "Sigmoid"},
    {ActivationFn::Tanh, "Tanh"},
    {ActivationFn::HardSigmoid, "HardSigmoid"},
    {ActivationFn::HardTanh, "HardTanh"},
}};

std::string label(const TemplateProfile& p) {
    return "profile '" + p.variant_id + "' (" + std::string(to_string(p.kind)) + ")";
}

Resources parse_resources(const json& j, const std::string& where) {
    ObjectReader r(j, where);
    Resources res{r.integer("lut"), r.integer("ff"), r.integer("dsp"), r.integer("bram")};
    r.finish();
    return res;
}

FixedPointFormat parse_format(const json& j, const std::string& where) {
    ObjectReader r(j, where);
    std::int64_t total = r.integer("total_bits");
    std::int64_t frac = r.integer("frac_bits");
    bool is_signed = r.boolean("signed");
    r.finish();
    if (total < 0 || total > 64 || frac < 0 || frac > 64) {
        throw ValidationError(where + ": format bit counts out of range");
    }
    return FixedPointFormat{static_cast<int>(total), static_cast<int>(frac), is_signed};
}

TemplateProfile parse_profile(const json& j, std::size_t index) {
    std::string where = "profiles[" + std::to_string(index) + "]";
    if (j.is_object() && j.contains("variant_id") && j["variant_id"].is_string()) {
        where += "('" + j["variant_id"].get<std::string>() + "')";
    }
    ObjectReader r(j, where);
    TemplateProfile p;
    try {
        p.kind = parse_template_kind(r.string("kind"));
    } catch (const ParseError& e) {
        throw ValidationError(where + ".kind: " + e.what());
    }
    p.variant_id = r.string("variant_id");
    if (auto fn = r.optional_string("activation_fn")) {
        try {
            p.activation_fn = parse_activation_fn(*fn);
        } catch (const ParseError& e) {
            throw ValidationError(where + ".activation_fn: " + e.what());
        }
    }
    p.latency_base_cycles = r.integer("latency_base_cycles");
    p.latency_cycles_per_unit = r.rational("latency_cycles_per_unit");
    p.resources = parse_resources(r.raw("resources"), r.where("resources"));
    p.dyn_power_coeff = r.rational("dyn_power_coeff");
    p.f_max = r.rational("f_max");
    p.format = parse_format(r.raw("format"), r.where("format"));
    p.max_abs_error = r.optional_rational("max_abs_error");
    r.finish();
    return p;
}

void validate_profile(const TemplateProfile& p) {
    const std::string who = label(p);
    if (p.variant_id.empty()) {
        throw ValidationError("profile with empty variant_id");
    }
    try {
        p.format.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(who + ": " + e.what());
    }
    if (p.f_max <= 0) {
        throw ValidationError(who + ": f_max must be > 0");
    }
    if (p.latency_base_cycles < 0 || p.latency_cycles_per_unit < 0) {
        throw ValidationError(who + ": latency model must be non-negative");
    }
    const Resources& r = p.resources;
    if (r.lut < 0 || r.ff < 0 || r.dsp < 0 || r.bram < 0) {
        throw ValidationError(who + ": resources must be non-negative");
    }
    if (p.dyn_power_coeff < 0) {
        throw ValidationError(who + ": dyn_power_coeff must be non-negative");
    }
    if (p.kind == TemplateKind::Activation && !p.activation_fn) {
        throw ValidationError(who + ": Activation profiles need activation_fn");
    }
    if (p.kind != TemplateKind::Activation && p.activation_fn) {
        throw ValidationError(who + ": activation_fn is only valid on Activation profiles");
    }
    if (p.max_abs_error && *p.max_abs_error < 0) {
        throw ValidationError(who + ": max_abs_error must be non-negative");
    }
}

}  // namespace

std::string_view to_string(TemplateKind kind) noexcept {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "?";
}

std::string_view to_string(ActivationFn fn) noexcept {
    for (const auto& [f, name] : kActivationNames) {
        if (f == fn) return name;
    }
    return "?";
}

TemplateKind parse_template_kind(std::string_view text) {
    for (const auto& [k, name] : kKindNames) {
        if (name == text) return k;
    }
    throw ParseError("unknown template kind '" + std::string(text) + "'");
}

ActivationFn parse_activation_fn(std::string_view text) {
    for (const auto& [f, name] : kActivationNames) {
        if (name == text) return f;
    }
    throw ParseError("unknown activation function '" + std::string(text) + "'");
}

std::int64_t TemplateProfile::latency(std::int64_t work_units) const {
    BigInt per_unit = ceil_int(latency_cycles_per_unit * work_units);
    return latency_base_cycles + per_unit.convert_to<std::int64_t>();
}

const TemplateProfile* Catalog::find(TemplateKind kind, std::string_view variant_id) const noexcept {
    for (const auto& p : profiles) {
        if (p.kind == kind && p.variant_id == variant_id) return &p;
    }
    return nullptr;
}

const TemplateProfile* Catalog::find_any(std::string_view variant_id) const noexcept {
    for (const auto& p : profiles) {
        if (p.variant_id == variant_id) return &p;
    }
    return nullptr;
}

void validate(const Catalog& catalog) {
    std::set<std::pair<TemplateKind, std::string>> seen;
    for (const auto& p : catalog.profiles) {
        validate_profile(p);
        if (!seen.emplace(p.kind, p.variant_id).second) {
            throw ValidationError(label(p) + ": duplicate (kind, variant_id)");
        }
    }
}

Catalog parse_catalog(const json& doc) {
    ObjectReader r(doc, "catalog");
    Catalog catalog;
    catalog.version = r.string("version");
    const json& profiles = r.raw("profiles");
    if (!profiles.is_array()) {
        throw ValidationError("catalog.profiles: expected an array");
    }
    r.finish();
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        catalog.profiles.push_back(parse_profile(profiles[i], i));
    }
    validate(catalog);
    return catalog;
}

Catalog parse_catalog_text(std::string_view text) {
    return parse_catalog(detail::parse_json_text(text, "catalog"));
}

Catalog load_catalog(const std::filesystem::path& path) {
    return parse_catalog(detail::parse_json_text(detail::read_text_file(path), path.string()));
}

json to_json(const TemplateProfile& p) {
    json j;
    j["kind"] = std::string(to_string(p.kind));
    j["variant_id"] = p.variant_id;
    if (p.activation_fn) {
        j["activation_fn"] = std::string(to_string(*p.activation_fn));
    }
    j["latency_base_cycles"] = p.latency_base_cycles;
    j["latency_cycles_per_unit"] = detail::rational_to_json(p.latency_cycles_per_unit);
    j["resources"] = {{"lut", p.resources.lut}, {"ff", p.resources.ff}, {"dsp", p.resources.dsp},
                      {"bram", p.resources.bram}};
    j["dyn_power_coeff"] = detail::rational_to_json(p.dyn_power_coeff);
    j["f_max"] = detail::rational_to_json(p.f_max);
    j["format"] = {{"total_bits", p.format.total_bits}, {"frac_bits", p.format.frac_bits},
                   {"signed", p.format.is_signed}};
    if (p.max_abs_error) {
        j["max_abs_error"] = detail::rational_to_json(*p.max_abs_error);
    }
    return j;
}

json to_json(const Catalog& catalog) {
    json profiles = json::array();
    for (const auto& p : catalog.profiles) {
        profiles.push_back(to_json(p));
    }
    return {{"version", catalog.version}, {"profiles", std::move(profiles)}};
}

}  // namespace fpgadse
