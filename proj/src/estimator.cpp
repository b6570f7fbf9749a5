#include "fpgadse/estimator.hpp"

#include "fpgadse/errors.hpp"
#include "fpgadse/workload.hpp"
#include "json_util.hpp"
#include "report_util.hpp"

#include <algorithm>

namespace fpgadse {

using detail::json;

namespace {

void add_resource_violations(const Resources& used, const Resources& cap, std::vector<Violation>& out) {
    auto check = [&](const char* name, std::int64_t u, std::int64_t c) {
        if (u > c) out.push_back({name, Rational(BigInt(u - c), BigInt(std::max<std::int64_t>(c, 1)))});
    };
    check("lut", used.lut, cap.lut);
    check("ff", used.ff, cap.ff);
    check("dsp", used.dsp, cap.dsp);
    check("bram", used.bram, cap.bram);
}

Rational clock_upper_bound(const FpgaDevice& device, const std::optional<Rational>& f_max_limit) {
    if (f_max_limit && *f_max_limit < device.f_max_device) return *f_max_limit;
    return device.f_max_device;
}

}  // namespace

bool EvalReport::violates(std::string_view constraint) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.constraint == constraint; });
}

void CostTotals::add(const LayerCost& cost) {
    cycles += cost.cycles;
    resources += cost.resources;
    dyn_coeff += cost.dyn_coeff;
    if (!f_max_limit || cost.f_max < *f_max_limit) f_max_limit = cost.f_max;
    if (cost.has_activation) {
        any_activation = true;
        if (!cost.activation_error) {
            unknown_activation_error = true;
        } else if (!max_activation_error || *cost.activation_error > *max_activation_error) {
            max_activation_error = cost.activation_error;
        }
    }
}

LayerCost layer_cost(const Layer& layer, const TemplateProfile& profile, const TemplateProfile* activation) {
    LayerCost cost;
    cost.cycles = profile.latency(layer.work_units);
    cost.resources = profile.resources;
    cost.dyn_coeff = profile.dyn_power_coeff;
    cost.f_max = profile.f_max;
    if (activation != nullptr) {
        cost.cycles += activation->latency(layer.activation_units());
        cost.resources += activation->resources;
        cost.dyn_coeff += activation->dyn_power_coeff;
        if (activation->f_max < cost.f_max) cost.f_max = activation->f_max;
        cost.has_activation = true;
        cost.activation_error = activation->max_abs_error;
    }
    return cost;
}

void check_assignment(const NetworkModel& model, const CandidateConfig& config) {
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        if (i >= config.assignment.size()) {
            throw MissingAssignment(i, "no template assigned");
        }
        const Layer& layer = model.layers[i];
        const LayerAssignment& a = config.assignment[i];
        if (a.layer.kind != layer.kind) {
            throw MissingAssignment(i, "expected a " + std::string(to_string(layer.kind)) + " template, got '" +
                                           a.layer.variant_id + "' (" + std::string(to_string(a.layer.kind)) + ")");
        }
        if (layer.activation) {
            if (!a.activation || a.activation->kind != TemplateKind::Activation ||
                a.activation->activation_fn != layer.activation) {
                throw MissingAssignment(i, "expected a " + std::string(to_string(*layer.activation)) +
                                               " activation template");
            }
        } else if (a.activation) {
            throw MissingAssignment(i, "layer has no activation but '" + a.activation->variant_id + "' was assigned");
        }
    }
    if (config.assignment.size() != model.layers.size()) {
        throw MissingAssignment(model.layers.size(), "more assignments than layers");
    }
}

CostTotals sum_costs(const NetworkModel& model, const CandidateConfig& config) {
    check_assignment(model, config);
    CostTotals totals;
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        const auto& a = config.assignment[i];
        totals.add(layer_cost(model.layers[i], a.layer, a.activation ? &*a.activation : nullptr));
    }
    return totals;
}

std::int64_t latency_cycles(const NetworkModel& model, const CandidateConfig& config) {
    return sum_costs(model, config).cycles;
}

EvalReport assemble_report(const CostTotals& totals, std::int64_t ops, const FpgaDevice& device,
                           const Rational& clock_mhz, const StrategyKind& strategy, const ApplicationSpec& appspec) {
    EvalReport r;
    r.cycles = totals.cycles;
    r.clock_mhz = clock_mhz;
    r.strategy = strategy;
    r.resources = totals.resources;
    r.dyn_coeff_sum = totals.dyn_coeff;
    r.t_inf = inference_time(Rational(totals.cycles), clock_mhz);
    r.p_active = active_power(device, totals.dyn_coeff, clock_mhz);
    r.p_idle = idle_power(device);
    r.e_inf = r.t_inf * r.p_active / 1000;
    r.ops = ops;
    r.efficiency_gops_per_w = r.e_inf > 0 ? Rational(Rational(ops) / (r.e_inf * 1000000)) : Rational(0);
    r.max_activation_error = totals.max_activation_error;
    r.period = nominal_period(appspec.workload);

    const SteadyState ss = steady_state(strategy, r.period, Rational(totals.cycles), totals.dyn_coeff, clock_mhz, device);
    r.energy_per_item = ss.energy_per_item;
    r.t_response = ss.response_time;

    add_resource_violations(r.resources, device.capacities, r.violations);

    const Rational upper = clock_upper_bound(device, totals.f_max_limit);
    if (clock_mhz < device.f_min) {
        r.violations.push_back({"clock", (device.f_min - clock_mhz) / device.f_min});
    } else if (clock_mhz > upper) {
        r.violations.push_back({"clock", (clock_mhz - upper) / upper});
    }
    if (!ss.energy_per_item) {
        r.violations.push_back({"period", (ss.required_period - r.period) / r.period});
    }
    if (appspec.latency_deadline && r.t_response > *appspec.latency_deadline) {
        r.violations.push_back({"deadline", (r.t_response - *appspec.latency_deadline) / *appspec.latency_deadline});
    }
    if (appspec.precision_budget && totals.any_activation) {
        const Rational& budget = *appspec.precision_budget;
        if (totals.unknown_activation_error) {
            r.violations.push_back({"precision", Rational(1)});
        } else if (totals.max_activation_error && *totals.max_activation_error > budget) {
            r.violations.push_back({"precision", (*totals.max_activation_error - budget) / budget});
        }
    }
    if (appspec.energy_budget && r.energy_per_item && *r.energy_per_item > 0) {
        r.items_within_budget = floor_int(*appspec.energy_budget / *r.energy_per_item).convert_to<std::int64_t>();
    }
    r.feasible = r.violations.empty();
    return r;
}

EvalReport estimate(const NetworkModel& model, const FpgaDevice& device, const CandidateConfig& config,
                    const ApplicationSpec& appspec) {
    const CostTotals totals = sum_costs(model, config);
    const Rational upper = clock_upper_bound(device, totals.f_max_limit);
    if (config.clock_mhz < device.f_min || config.clock_mhz > upper) {
        throw InfeasibleFrequency("clock " + to_exact_string(config.clock_mhz) + " MHz outside [" +
                                  to_exact_string(device.f_min) + ", " + to_exact_string(upper) + "] MHz");
    }
    validate(config.strategy);
    return assemble_report(totals, ops_count(model), device, config.clock_mhz, config.strategy, appspec);
}

std::optional<Rational> objective_value(const EvalReport& report, Objective objective) {
    switch (objective) {
        case Objective::MinEnergyPerItem: return report.energy_per_item;
        case Objective::MinLatency: return report.t_response;
        case Objective::MaxEnergyEfficiency: return report.e_inf;
    }
    return std::nullopt;
}

Rational efficiency_ratio(const Rational& efficiency_a, const Rational& efficiency_b) {
    if (efficiency_a <= 0 || efficiency_b <= 0) {
        throw DomainError("efficiency_ratio needs positive efficiencies");
    }
    return efficiency_b / efficiency_a;
}

Rational efficiency_ratio(const EvalReport& a, const EvalReport& b) {
    return efficiency_ratio(a.efficiency_gops_per_w, b.efficiency_gops_per_w);
}

Rational latency_reduction_pct(const Rational& before, const Rational& after) {
    if (before <= 0 || after < 0) {
        throw DomainError("latency_reduction_pct needs before > 0 and after >= 0");
    }
    return (before - after) / before * 100;
}

json to_json(const CandidateConfig& config) {
    json layers = json::array();
    for (const auto& a : config.assignment) {
        json entry{{"layer", a.layer.variant_id}};
        entry["activation"] = a.activation ? json(a.activation->variant_id) : json(nullptr);
        layers.push_back(std::move(entry));
    }
    return {{"assignment", std::move(layers)},
            {"clock_mhz", detail::approx(config.clock_mhz)},
            {"strategy", to_json(config.strategy)}};
}

json to_json(const EvalReport& r) {
    using detail::approx;
    using detail::exact;
    json violations = json::array();
    json excess = json::object();
    for (const auto& v : r.violations) {
        violations.push_back(v.constraint);
        excess[v.constraint] = approx(v.excess);
    }
    json j;
    j["strategy"] = to_json(r.strategy);
    j["clock_mhz"] = approx(r.clock_mhz);
    j["cycles"] = r.cycles;
    j["t_inf_ms"] = approx(r.t_inf);
    j["t_response_ms"] = approx(r.t_response);
    j["resources"] = {{"lut", r.resources.lut}, {"ff", r.resources.ff}, {"dsp", r.resources.dsp},
                      {"bram", r.resources.bram}};
    j["dyn_coeff_sum_mw_per_mhz"] = approx(r.dyn_coeff_sum);
    j["p_active_mw"] = approx(r.p_active);
    j["p_idle_mw"] = approx(r.p_idle);
    j["e_inf_mj"] = approx(r.e_inf);
    j["energy_per_item_mj"] = approx(r.energy_per_item);
    j["period_ms"] = approx(r.period);
    j["ops"] = r.ops;
    j["efficiency_gops_per_w"] = approx(r.efficiency_gops_per_w);
    j["max_activation_error"] = approx(r.max_activation_error);
    j["items_within_budget"] = r.items_within_budget ? json(*r.items_within_budget) : json(nullptr);
    j["feasible"] = r.feasible;
    j["violations"] = std::move(violations);
    j["violation_excess"] = std::move(excess);
    j["exact"] = {{"t_inf_ms", exact(r.t_inf)},
                  {"t_response_ms", exact(r.t_response)},
                  {"p_active_mw", exact(r.p_active)},
                  {"e_inf_mj", exact(r.e_inf)},
                  {"energy_per_item_mj", exact(r.energy_per_item)},
                  {"efficiency_gops_per_w", exact(r.efficiency_gops_per_w)}};
    j["units"] = {{"efficiency", "GOPS/W"}, {"efficiency_alias", "GOPS/s/W"}, {"energy_scope", "FPGA only"}};
    return j;
}

std::string eval_csv_header() {
    return "strategy,clock_mhz,cycles,t_inf_ms,t_response_ms,lut,ff,dsp,bram,p_active_mw,p_idle_mw,e_inf_mj,"
           "energy_per_item_mj,efficiency_gops_per_w,feasible,violations";
}

std::string eval_csv_row(const EvalReport& r) {
    using detail::csv_number;
    std::string violations;
    for (const auto& v : r.violations) {
        if (!violations.empty()) violations += ';';
        violations += v.constraint;
    }
    std::string row = "\"" + to_string(r.strategy) + "\"";
    for (const std::string& field :
         {csv_number(r.clock_mhz), std::to_string(r.cycles), csv_number(r.t_inf), csv_number(r.t_response),
          std::to_string(r.resources.lut), std::to_string(r.resources.ff), std::to_string(r.resources.dsp),
          std::to_string(r.resources.bram), csv_number(r.p_active), csv_number(r.p_idle), csv_number(r.e_inf),
          csv_number(r.energy_per_item), csv_number(r.efficiency_gops_per_w),
          std::string(r.feasible ? "true" : "false"), violations}) {
        row += ',';
        row += field;
    }
    return row;
}

}  // namespace fpgadse
