#pragma once

#include "fpgadse/catalog.hpp"
#include "fpgadse/model.hpp"
#include "fpgadse/strategy.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fpgadse {

struct LayerAssignment {
    TemplateProfile layer;
    std::optional<TemplateProfile> activation;

    friend bool operator==(const LayerAssignment&, const LayerAssignment&) = default;
};

/// One point of the design space. assignment[i] serves model.layers[i].
struct CandidateConfig {
    std::vector<LayerAssignment> assignment;
    Rational clock_mhz;
    StrategyKind strategy;

    friend bool operator==(const CandidateConfig&, const CandidateConfig&) = default;
};

/// Constraint breach. `excess` is relative: (actual - limit) / limit.
struct Violation {
    std::string constraint;  // lut, ff, dsp, bram, clock, period, deadline, precision
    Rational excess;

    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Units: ms, mW, mJ, MHz. Efficiency is GOPS/W, i.e. operations per nJ.
struct EvalReport {
    std::int64_t cycles = 0;
    Rational clock_mhz;
    Rational t_inf;
    Rational t_response;
    Resources resources;
    Rational dyn_coeff_sum;
    Rational p_active;
    Rational p_idle;
    Rational e_inf;
    std::optional<Rational> energy_per_item;
    Rational period;
    std::int64_t ops = 0;
    Rational efficiency_gops_per_w;
    std::optional<Rational> max_activation_error;
    std::optional<std::int64_t> items_within_budget;
    StrategyKind strategy;
    bool feasible = true;
    std::vector<Violation> violations;

    bool violates(std::string_view constraint) const;

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Per-layer contribution; everything the estimator sums across layers.
struct LayerCost {
    std::int64_t cycles = 0;
    Resources resources;
    Rational dyn_coeff;
    Rational f_max;
    bool has_activation = false;
    std::optional<Rational> activation_error;  // declared max_abs_error, if any
};

struct CostTotals {
    std::int64_t cycles = 0;
    Resources resources;
    Rational dyn_coeff;
    std::optional<Rational> f_max_limit;
    bool any_activation = false;
    bool unknown_activation_error = false;
    std::optional<Rational> max_activation_error;

    void add(const LayerCost& cost);
};

LayerCost layer_cost(const Layer& layer, const TemplateProfile& profile, const TemplateProfile* activation);

/// Checks kinds and activation presence; throws MissingAssignment(index).
void check_assignment(const NetworkModel& model, const CandidateConfig& config);

CostTotals sum_costs(const NetworkModel& model, const CandidateConfig& config);

/// Sequential layer execution: sum of layer and activation latencies.
std::int64_t latency_cycles(const NetworkModel& model, const CandidateConfig& config);

/// Builds the report from summed costs. Constraint breaches become violations;
/// nothing here throws.
EvalReport assemble_report(const CostTotals& totals, std::int64_t ops, const FpgaDevice& device,
                           const Rational& clock_mhz, const StrategyKind& strategy, const ApplicationSpec& appspec);

/// Throws MissingAssignment, or InfeasibleFrequency when the clock is outside
/// [f_min, min(f_max_device, profile f_max)].
EvalReport estimate(const NetworkModel& model, const FpgaDevice& device, const CandidateConfig& config,
                    const ApplicationSpec& appspec);

/// Value minimised by the search. MaxEnergyEfficiency minimises e_inf.
std::optional<Rational> objective_value(const EvalReport& report, Objective objective);

/// b.efficiency / a.efficiency. Throws DomainError on non-positive inputs.
Rational efficiency_ratio(const EvalReport& a, const EvalReport& b);
Rational efficiency_ratio(const Rational& efficiency_a, const Rational& efficiency_b);
/// (before - after) / before * 100.
Rational latency_reduction_pct(const Rational& before, const Rational& after);

nlohmann::json to_json(const EvalReport& report);
nlohmann::json to_json(const CandidateConfig& config);
std::string eval_csv_header();
std::string eval_csv_row(const EvalReport& report);

}  // namespace fpgadse
