#include "fpgadse/model.hpp"

#include "fpgadse/errors.hpp"
#include "json_util.hpp"

#include <numeric>
#include <set>
#include <sstream>

namespace fpgadse {

using detail::json;
using detail::ObjectReader;

namespace {

std::vector<std::string> split_fields(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos - start));
        if (pos == std::string::npos) return parts;
        start = pos + 1;
    }
}

Rational parse_ms(std::string text) {
    if (text.size() > 2 && text.ends_with("ms")) text.resize(text.size() - 2);
    return parse_rational(text);
}


template <class T>
T require_enum(ObjectReader& r, const std::string& key, T (*parse)(std::string_view)) {
    try {
        return parse(r.string(key));
    } catch (const ParseError& e) {
        throw ValidationError(r.where(key) + ": " + e.what());
    }
}

Objective parse_objective(std::string_view text) {
    for (auto o : {Objective::MaxEnergyEfficiency, Objective::MinEnergyPerItem, Objective::MinLatency}) {
        if (to_string(o) == text) return o;
    }
    throw ParseError("unknown objective '" + std::string(text) + "'");
}

GapDistribution parse_distribution(std::string_view text) {
    for (auto d : {GapDistribution::Exponential, GapDistribution::BimodalUniform}) {
        if (to_string(d) == text) return d;
    }
    throw ParseError("unknown distribution '" + std::string(text) + "'");
}

void require_positive(const std::optional<Rational>& value, const std::string& name) {
    if (value && *value <= 0) {
        throw ValidationError("appspec." + name + ": must be > 0 when present");
    }
}

const std::set<std::string>& expected_params(GapDistribution d) {
    static const std::set<std::string> exponential{"mean"};
    static const std::set<std::string> bimodal{"p_short", "short_min", "short_max", "long_min", "long_max"};
    return d == GapDistribution::Exponential ? exponential : bimodal;
}

Workload parse_workload(const json& j, const std::filesystem::path& base_dir) {
    ObjectReader r(j, "appspec.workload");
    const std::string kind = r.string("kind");
    Workload workload;
    if (kind == "Regular") {
        workload = RegularWorkload{r.rational("period")};
    } else if (kind == "Trace") {
        TraceWorkload trace;
        if (r.has("file")) {
            std::filesystem::path file = r.string("file");
            trace.gaps = load_trace(file.is_absolute() ? file : base_dir / file);
        } else {
            const json& gaps = r.raw("gaps");
            if (!gaps.is_array()) {
                throw ValidationError("appspec.workload.gaps: expected an array");
            }
            for (std::size_t i = 0; i < gaps.size(); ++i) {
                trace.gaps.push_back(detail::rational_from_json(gaps[i], "appspec.workload.gaps[" + std::to_string(i) + "]"));
            }
        }
        workload = std::move(trace);
    } else if (kind == "Stochastic") {
        StochasticWorkload s;
        s.distribution = require_enum(r, "distribution", &parse_distribution);
        const json& params = r.raw("params");
        ObjectReader pr(params, "appspec.workload.params");
        for (const auto& name : expected_params(s.distribution)) {
            s.params[name] = pr.rational(name);
        }
        pr.finish();
        std::int64_t seed = r.integer("seed");
        if (seed < 0) {
            throw ValidationError("appspec.workload.seed: must be non-negative");
        }
        s.seed = static_cast<std::uint64_t>(seed);
        workload = std::move(s);
    } else {
        throw ValidationError("appspec.workload.kind: expected Regular, Trace or Stochastic, got '" + kind + "'");
    }
    r.finish();
    return workload;
}

json workload_to_json(const Workload& workload) {
    return std::visit(
        [](const auto& w) -> json {
            using T = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<T, RegularWorkload>) {
                return {{"kind", "Regular"}, {"period", detail::rational_to_json(w.period)}};
            } else if constexpr (std::is_same_v<T, TraceWorkload>) {
                json gaps = json::array();
                for (const auto& g : w.gaps) gaps.push_back(detail::rational_to_json(g));
                return {{"kind", "Trace"}, {"gaps", std::move(gaps)}};
            } else {
                json params = json::object();
                for (const auto& [k, v] : w.params) params[k] = detail::rational_to_json(v);
                return {{"kind", "Stochastic"},
                        {"distribution", std::string(to_string(w.distribution))},
                        {"params", std::move(params)},
                        {"seed", w.seed}};
            }
        },
        workload);
}

}  // namespace

std::int64_t Layer::activation_units() const {
    if (auto it = dims.find("activations"); it != dims.end()) {
        return it->second;
    }
    auto get = [&](const char* key) {
        auto it = dims.find(key);
        return it == dims.end() ? std::int64_t{1} : it->second;
    };
    return get("outputs") * get("timesteps");
}

std::int64_t ops_count(const NetworkModel& model) {
    return std::accumulate(model.layers.begin(), model.layers.end(), std::int64_t{0},
                           [](std::int64_t acc, const Layer& l) { return acc + l.op_count; });
}

std::string_view to_string(Objective objective) noexcept {
    switch (objective) {
        case Objective::MaxEnergyEfficiency: return "MaxEnergyEfficiency";
        case Objective::MinEnergyPerItem: return "MinEnergyPerItem";
        case Objective::MinLatency: return "MinLatency";
    }
    return "?";
}

std::string_view to_string(GapDistribution distribution) noexcept {
    return distribution == GapDistribution::Exponential ? "Exponential" : "BimodalUniform";
}

Rational nominal_period(const Workload& workload) {
    return std::visit(
        [](const auto& w) -> Rational {
            using T = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<T, RegularWorkload>) {
                return w.period;
            } else if constexpr (std::is_same_v<T, TraceWorkload>) {
                if (w.gaps.empty()) throw EmptyTrace();
                Rational sum = 0;
                for (const auto& g : w.gaps) sum += g;
                return sum / static_cast<long>(w.gaps.size());
            } else {
                const auto& p = w.params;
                if (w.distribution == GapDistribution::Exponential) {
                    return p.at("mean");
                }
                const Rational& q = p.at("p_short");
                return q * (p.at("short_min") + p.at("short_max")) / 2 +
                       (1 - q) * (p.at("long_min") + p.at("long_max")) / 2;
            }
        },
        workload);
}

void validate(const NetworkModel& model) {
    if (model.layers.empty()) {
        throw ValidationError("model '" + model.name + "': layer list is empty");
    }
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        const Layer& l = model.layers[i];
        const std::string who = "model.layers[" + std::to_string(i) + "]";
        if (l.kind == TemplateKind::Activation) {
            throw ValidationError(who + ".kind: Activation is attached to a layer, not a layer itself");
        }
        if (l.work_units < 1) {
            throw ValidationError(who + ".work_units: must be >= 1");
        }
        if (l.op_count < l.work_units) {
            throw ValidationError(who + ".op_count: must be >= work_units");
        }
        for (const auto& [name, value] : l.dims) {
            if (value <= 0) {
                throw ValidationError(who + ".dims." + name + ": must be positive");
            }
        }
    }
}

void validate(const FpgaDevice& d) {
    const Resources& c = d.capacities;
    if (c.lut <= 0 || c.ff <= 0 || c.dsp <= 0 || c.bram <= 0) {
        throw ValidationError("device.capacities: all capacities must be positive");
    }
    if (d.f_min <= 0 || d.f_min > d.f_max_device) {
        throw ValidationError("device: frequency range requires 0 < f_min <= f_max_device");
    }
    if (d.t_config < 0) throw ValidationError("device.t_config: must be >= 0");
    if (d.p_config < 0) throw ValidationError("device.p_config: must be >= 0");
    if (d.p_static < 0) throw ValidationError("device.p_static: must be >= 0");
    if (d.c_idle_dyn < 0) throw ValidationError("device.c_idle_dyn: must be >= 0");
}

void validate(const ApplicationSpec& spec) {
    std::visit(
        [](const auto& w) {
            using T = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<T, RegularWorkload>) {
                if (w.period <= 0) throw ValidationError("appspec.workload.period: must be > 0");
            } else if constexpr (std::is_same_v<T, TraceWorkload>) {
                if (w.gaps.empty()) throw EmptyTrace();
                for (std::size_t i = 0; i < w.gaps.size(); ++i) {
                    if (w.gaps[i] <= 0) throw NonPositiveGap(i + 1, to_exact_string(w.gaps[i]));
                }
            } else {
                const auto& p = w.params;
                if (w.distribution == GapDistribution::Exponential) {
                    if (p.at("mean") <= 0) throw ValidationError("appspec.workload.params.mean: must be > 0");
                } else {
                    if (p.at("p_short") < 0 || p.at("p_short") > 1) {
                        throw ValidationError("appspec.workload.params.p_short: must be in [0, 1]");
                    }
                    if (p.at("short_min") <= 0 || p.at("short_min") > p.at("short_max") || p.at("long_min") <= 0 ||
                        p.at("long_min") > p.at("long_max")) {
                        throw ValidationError("appspec.workload.params: ranges need 0 < min <= max");
                    }
                }
            }
        },
        spec.workload);
    require_positive(spec.latency_deadline, "latency_deadline");
    require_positive(spec.energy_budget, "energy_budget");
    require_positive(spec.precision_budget, "precision_budget");
    if (spec.requests && *spec.requests < 1) {
        throw ValidationError("appspec.requests: must be >= 1");
    }
}

NetworkModel parse_model(const json& doc) {
    ObjectReader r(doc, "model");
    NetworkModel model;
    model.name = r.string("name");
    const json& layers = r.raw("layers");
    if (!layers.is_array()) {
        throw ValidationError("model.layers: expected an array");
    }
    r.finish();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        ObjectReader lr(layers[i], "model.layers[" + std::to_string(i) + "]");
        Layer layer;
        layer.kind = require_enum(lr, "kind", &parse_template_kind);
        if (auto act = lr.optional_string("activation")) {
            try {
                layer.activation = parse_activation_fn(*act);
            } catch (const ParseError& e) {
                throw ValidationError(lr.where("activation") + ": " + e.what());
            }
        }
        layer.work_units = lr.integer("work_units");
        layer.op_count = lr.integer("op_count");
        if (const json* dims = lr.raw_optional("dims")) {
            if (!dims->is_object()) throw ValidationError(lr.where("dims") + ": expected an object");
            for (const auto& item : dims->items()) {
                if (!item.value().is_number_integer()) {
                    throw ValidationError(lr.where("dims") + "." + item.key() + ": expected an integer");
                }
                layer.dims[item.key()] = item.value().get<std::int64_t>();
            }
        }
        lr.finish();
        model.layers.push_back(std::move(layer));
    }
    validate(model);
    return model;
}

FpgaDevice parse_device(const json& doc) {
    ObjectReader r(doc, "device");
    FpgaDevice d;
    d.name = r.string("name");
    {
        ObjectReader cr(r.raw("capacities"), "device.capacities");
        d.capacities = Resources{cr.integer("lut"), cr.integer("ff"), cr.integer("dsp"), cr.integer("bram")};
        cr.finish();
    }
    d.p_static = r.rational("p_static");
    d.c_idle_dyn = r.optional_rational("c_idle_dyn").value_or(Rational(0));
    d.f_min = r.rational("f_min");
    d.f_max_device = r.rational("f_max_device");
    d.t_config = r.rational("t_config");
    d.p_config = r.rational("p_config");
    r.finish();
    validate(d);
    return d;
}

ApplicationSpec parse_appspec(const json& doc, const std::filesystem::path& base_dir) {
    ObjectReader r(doc, "appspec");
    ApplicationSpec spec;
    spec.workload = parse_workload(r.raw("workload"), base_dir);
    spec.latency_deadline = r.optional_rational("latency_deadline");
    spec.energy_budget = r.optional_rational("energy_budget");
    spec.precision_budget = r.optional_rational("precision_budget");
    spec.objective = require_enum(r, "objective", &parse_objective);
    if (const json* req = r.raw_optional("requests")) {
        if (!req->is_number_integer()) throw ValidationError("appspec.requests: expected an integer");
        spec.requests = req->get<std::int64_t>();
    }
    r.finish();
    validate(spec);
    return spec;
}

NetworkModel load_model(const std::filesystem::path& path) {
    return parse_model(detail::parse_json_text(detail::read_text_file(path), path.string()));
}

FpgaDevice load_device(const std::filesystem::path& path) {
    return parse_device(detail::parse_json_text(detail::read_text_file(path), path.string()));
}

ApplicationSpec load_appspec(const std::filesystem::path& path) {
    return parse_appspec(detail::parse_json_text(detail::read_text_file(path), path.string()), path.parent_path());
}

std::vector<Rational> parse_trace_text(std::string_view text) {
    std::vector<Rational> gaps;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        std::string token = line.substr(first, last - first + 1);
        if (token.size() > 2 && token.ends_with("ms")) token.resize(token.size() - 2);
        Rational gap;
        try {
            gap = parse_rational(token);
        } catch (const ParseError& e) {
            throw ParseError("trace line " + std::to_string(line_no) + ": " + e.what());
        }
        if (gap <= 0) {
            throw NonPositiveGap(line_no, token);
        }
        gaps.push_back(gap);
    }
    if (gaps.empty()) {
        throw EmptyTrace();
    }
    return gaps;
}

std::vector<Rational> load_trace(const std::filesystem::path& path) {
    return parse_trace_text(detail::read_text_file(path));
}

json to_json(const NetworkModel& model) {
    json layers = json::array();
    for (const auto& l : model.layers) {
        json j{{"kind", std::string(to_string(l.kind))}, {"work_units", l.work_units}, {"op_count", l.op_count}};
        if (l.activation) j["activation"] = std::string(to_string(*l.activation));
        if (!l.dims.empty()) j["dims"] = l.dims;
        layers.push_back(std::move(j));
    }
    return {{"name", model.name}, {"layers", std::move(layers)}};
}

json to_json(const FpgaDevice& d) {
    using detail::rational_to_json;
    return {{"name", d.name},
            {"capacities",
             {{"lut", d.capacities.lut}, {"ff", d.capacities.ff}, {"dsp", d.capacities.dsp}, {"bram", d.capacities.bram}}},
            {"p_static", rational_to_json(d.p_static)},
            {"c_idle_dyn", rational_to_json(d.c_idle_dyn)},
            {"f_min", rational_to_json(d.f_min)},
            {"f_max_device", rational_to_json(d.f_max_device)},
            {"t_config", rational_to_json(d.t_config)},
            {"p_config", rational_to_json(d.p_config)}};
}

json to_json(const ApplicationSpec& spec) {
    json j{{"workload", workload_to_json(spec.workload)}, {"objective", std::string(to_string(spec.objective))}};
    if (spec.latency_deadline) j["latency_deadline"] = detail::rational_to_json(*spec.latency_deadline);
    if (spec.energy_budget) j["energy_budget"] = detail::rational_to_json(*spec.energy_budget);
    if (spec.precision_budget) j["precision_budget"] = detail::rational_to_json(*spec.precision_budget);
    if (spec.requests) j["requests"] = *spec.requests;
    return j;
}

Workload parse_workload_spec(std::string_view text) {
    const std::string spec(text);
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw ParseError("malformed workload spec '" + spec + "'");
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    try {
        if (kind == "regular") {
            return RegularWorkload{parse_ms(rest)};
        }
        if (kind == "trace") {
            if (rest.empty()) throw ParseError("trace workload needs a path");
            return TraceWorkload{load_trace(rest)};
        }
        const auto fields = split_fields(rest, ',');
        auto seed_of = [&](const std::string& s) {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(s, &used);
            if (used != s.size()) throw ParseError("bad seed '" + s + "'");
            return static_cast<std::uint64_t>(v);
        };
        if (kind == "exp") {
            if (fields.size() != 2) throw ParseError("exp workload is exp:MEAN,SEED");
            return StochasticWorkload{GapDistribution::Exponential, {{"mean", parse_ms(fields[0])}}, seed_of(fields[1])};
        }
        if (kind == "bimodal") {
            if (fields.size() != 6) throw ParseError("bimodal workload is bimodal:P,SMIN,SMAX,LMIN,LMAX,SEED");
            return StochasticWorkload{GapDistribution::BimodalUniform,
                                      {{"p_short", parse_rational(fields[0])},
                                       {"short_min", parse_ms(fields[1])},
                                       {"short_max", parse_ms(fields[2])},
                                       {"long_min", parse_ms(fields[3])},
                                       {"long_max", parse_ms(fields[4])}},
                                      seed_of(fields[5])};
        }
    } catch (const std::logic_error&) {
        throw ParseError("malformed workload spec '" + spec + "'");
    }
    throw ParseError("unknown workload kind '" + kind + "'");
}

}  // namespace fpgadse
