#pragma once

#include "fpgadse/estimator.hpp"
#include "fpgadse/model.hpp"
#include "fpgadse/strategy.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fpgadse {

// Power model: P(f) = p_static + K f while computing, p_static + c_idle_dyn
// while idle-but-configured, p_config while configuring, zero when off.
Rational inference_time(const Rational& cycles, const Rational& clock_mhz);
Rational active_power(const FpgaDevice& device, const Rational& dyn_coeff, const Rational& clock_mhz);
Rational idle_power(const FpgaDevice& device);
Rational inference_energy(const FpgaDevice& device, const Rational& cycles, const Rational& dyn_coeff,
                          const Rational& clock_mhz);

/// f' = clamp(cycles / period, f_min, clock_mhz): the slowest clock that still
/// finishes one inference per period.
Rational clock_aligned_frequency(const Rational& cycles, const Rational& period, const FpgaDevice& device,
                                 const Rational& clock_mhz);

struct SteadyState {
    std::optional<Rational> energy_per_item;  // nullopt when the period is too short
    Rational response_time;                   // arrival to completion, ms
    Rational required_period;                 // shortest period the strategy sustains
};

/// Steady-state per-item analytics for a regular period. `cycles` is rational
/// so the generator can evaluate it at relaxed (bound) points.
SteadyState steady_state(const StrategyKind& strategy, const Rational& period, const Rational& cycles,
                         const Rational& dyn_coeff, const Rational& clock_mhz, const FpgaDevice& device);

/// Throws PeriodTooShort naming the strategy.
Rational analytic_energy_per_item(const StrategyKind& strategy, const Rational& period, const EvalReport& report,
                                  const FpgaDevice& device);

struct BreakEven {
    Rational period;        // valid when !infinite
    bool infinite = false;  // idle power is zero: staying on never loses
};

/// T* = t_inf + E_config / p_idle.
BreakEven break_even_period(const EvalReport& report, const FpgaDevice& device);

/// floor(budget / energy_per_item).
std::int64_t items_within_budget(const StrategyKind& strategy, const Rational& period, const Rational& budget,
                                 const EvalReport& report, const FpgaDevice& device);
Rational strategy_item_ratio(const StrategyKind& a, const StrategyKind& b, const Rational& period,
                             const Rational& budget, const EvalReport& report, const FpgaDevice& device);

/// Hindsight energy of one gap: e_inf plus either idle energy over the idle
/// part of the gap (stay on) or one reconfiguration (power off).
struct GapCostModel {
    Rational e_inf;
    Rational t_inf;
    Rational p_idle;
    Rational config_energy;

    Rational idle_cost(const Rational& gap) const;
    Rational cost(const Rational& gap, bool stay_on) const { return e_inf + (stay_on ? idle_cost(gap) : config_energy); }
    bool stay_on_is_best(const Rational& gap) const { return idle_cost(gap) <= config_energy; }
};

GapCostModel gap_cost_model(const EvalReport& report, const FpgaDevice& device);

struct ThresholdChoice {
    Rational theta;
    Rational total_energy;  // hindsight energy over the whole trace
};

/// Sweeps theta over {min_gap / 2} and every distinct gap; ties go to the smaller theta.
ThresholdChoice learn_threshold_offline(const std::vector<Rational>& gaps, const EvalReport& report,
                                        const FpgaDevice& device);
ThresholdChoice learn_threshold_offline(const std::vector<Rational>& gaps, const GapCostModel& costs);

/// Hindsight energy when gap i stays on iff gap_i <= theta.
Rational fixed_threshold_energy(const std::vector<Rational>& gaps, const GapCostModel& costs, const Rational& theta);

struct SimResult {
    std::string strategy;
    std::int64_t requests = 0;
    std::int64_t items_processed = 0;
    Rational total_energy;
    Rational energy_per_item;
    Rational setup_energy;           // standing configuration charged at t = 0
    Rational steady_energy_per_item; // (total - setup) / items
    std::int64_t missed_deadlines = 0;
    std::int64_t max_backlog = 0;
    std::int64_t reconfigurations = 0;  // every configuration, including the initial one
    Rational run_clock_mhz;
    Rational window;                    // ms
    Rational busy_time;                 // ms spent computing
    std::vector<std::pair<std::int64_t, Rational>> theta_trajectory;
    std::optional<Rational> hindsight_energy;  // Adaptive: trace cost of the theta decisions

    friend bool operator==(const SimResult&, const SimResult&) = default;
};

/// Gap sequence for a workload: Regular repeats the period `requests` times,
/// Trace returns its gaps, Stochastic draws `requests` seeded gaps at 1 us resolution.
std::vector<Rational> generate_gaps(const Workload& workload, std::int64_t requests);

struct SimInputs {
    std::int64_t cycles = 0;
    Rational dyn_coeff;
    Rational clock_mhz;
    StrategyKind strategy;
    std::optional<Rational> deadline;
    std::optional<Rational> nominal_period;  // defaults to the mean gap
};

/// Request i arrives at the sum of the gaps before it and owns the gap after
/// it; the window ends at the sum of all gaps or the last completion.
SimResult simulate(const SimInputs& inputs, const FpgaDevice& device, const std::vector<Rational>& gaps);

SimResult simulate(const NetworkModel& model, const FpgaDevice& device, const CandidateConfig& config,
                   const std::vector<Rational>& gaps, const std::optional<Rational>& deadline = std::nullopt);

nlohmann::json to_json(const SimResult& result);
std::string theta_csv(const SimResult& result);

}  // namespace fpgadse
