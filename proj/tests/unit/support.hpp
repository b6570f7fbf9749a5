#pragma once

#include "fpgadse/catalog.hpp"
#include "fpgadse/estimator.hpp"
#include "fpgadse/model.hpp"
#include "fpgadse/strategy.hpp"

#include <string>

namespace fpgadse::testing {

inline std::string data_path(const std::string& rel) { return std::string(FPGADSE_DATA_DIR) + "/" + rel; }

inline Rational R(const char* text) { return parse_rational(text); }

/// p_static 100 mW, no idle dynamic power, 20 ms / 200 mW configuration.
inline FpgaDevice example_device() {
    FpgaDevice d;
    d.name = "example";
    d.capacities = {20000, 40000, 40, 50};
    d.p_static = 100;
    d.c_idle_dyn = 0;
    d.f_min = 10;
    d.f_max_device = 100;
    d.t_config = 20;
    d.p_config = 200;
    return d;
}

inline TemplateProfile profile(TemplateKind kind, std::string id, std::int64_t base, const char* per_unit,
                               Resources res, const char* coeff, std::int64_t f_max) {
    TemplateProfile p;
    p.kind = kind;
    p.variant_id = std::move(id);
    p.latency_base_cycles = base;
    p.latency_cycles_per_unit = parse_rational(per_unit);
    p.resources = res;
    p.dyn_power_coeff = parse_rational(coeff);
    p.f_max = f_max;
    p.format = {16, 8, true};
    return p;
}

inline TemplateProfile activation_profile(ActivationFn fn, std::string id, const char* per_unit, const char* coeff,
                                          std::optional<Rational> error = Rational(0)) {
    TemplateProfile p = profile(TemplateKind::Activation, std::move(id), 0, per_unit, {100, 100, 0, 0}, coeff, 200);
    p.activation_fn = fn;
    p.max_abs_error = std::move(error);
    return p;
}

/// One LSTM layer whose example assignment costs 500 000 cycles with a
/// coefficient sum of 2 mW/MHz.
inline NetworkModel example_model() {
    Layer layer;
    layer.kind = TemplateKind::LSTMCell;
    layer.activation = ActivationFn::HardSigmoid;
    layer.work_units = 49000;
    layer.op_count = 392000;
    layer.dims = {{"activations", 8000}};
    return {"lstm", {layer}};
}

inline CandidateConfig example_config(StrategyKind strategy = StrategyKind::idle_waiting()) {
    CandidateConfig c;
    c.assignment.push_back({profile(TemplateKind::LSTMCell, "lstm_pipe", 2000, "10", {6000, 8000, 24, 10}, "1.5", 150),
                            activation_profile(ActivationFn::HardSigmoid, "hsig_comb", "1", "0.5")});
    c.clock_mhz = 100;
    c.strategy = strategy;
    return c;
}

inline ApplicationSpec regular(const Rational& period) {
    ApplicationSpec a;
    a.workload = RegularWorkload{period};
    return a;
}

}  // namespace fpgadse::testing
