#include "fpgadse/workload.hpp"

#include "fpgadse/errors.hpp"
#include "json_util.hpp"
#include "report_util.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

namespace fpgadse {

using detail::json;

namespace {

const Rational kMicrosecond(1, 1000);   // ms
const Rational kNanosecond(1, 1000000);  // ms

Rational round_to_grid(const Rational& value, const Rational& grid) {
    Rational q = value / grid;
    return Rational(div_round_half_even(boost::multiprecision::numerator(q), boost::multiprecision::denominator(q))) *
           grid;
}

/// Rounds onto the microsecond grid in the direction of `target`.
Rational round_toward(const Rational& value, const Rational& target) {
    Rational q = value / kMicrosecond;
    BigInt steps = target >= value ? ceil_int(q) : floor_int(q);
    return Rational(steps) * kMicrosecond;
}

double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

Rational microsecond_gap(double ms) {
    long long us = std::llround(ms * 1000.0);
    return Rational(BigInt(std::max(1LL, us)), BigInt(1000));
}

}  // namespace

Rational inference_time(const Rational& cycles, const Rational& clock_mhz) {
    return cycles / (clock_mhz * 1000);
}

Rational active_power(const FpgaDevice& device, const Rational& dyn_coeff, const Rational& clock_mhz) {
    return device.p_static + dyn_coeff * clock_mhz;
}

Rational idle_power(const FpgaDevice& device) {
    return device.p_static + device.c_idle_dyn;
}

Rational inference_energy(const FpgaDevice& device, const Rational& cycles, const Rational& dyn_coeff,
                          const Rational& clock_mhz) {
    return inference_time(cycles, clock_mhz) * active_power(device, dyn_coeff, clock_mhz) / 1000;
}

Rational clock_aligned_frequency(const Rational& cycles, const Rational& period, const FpgaDevice& device,
                                 const Rational& clock_mhz) {
    Rational f = cycles / (period * 1000);
    if (f < device.f_min) f = device.f_min;
    if (f > clock_mhz) f = clock_mhz;
    return f;
}

SteadyState steady_state(const StrategyKind& strategy, const Rational& period, const Rational& cycles,
                         const Rational& dyn_coeff, const Rational& clock_mhz, const FpgaDevice& device) {
    const Rational t = inference_time(cycles, clock_mhz);
    const Rational e = t * active_power(device, dyn_coeff, clock_mhz) / 1000;
    const Rational p_idle = idle_power(device);
    const Rational wake_time = device.t_config + t;

    auto on_off = [&]() -> std::optional<Rational> {
        if (period < wake_time) return std::nullopt;
        return device.config_energy() + e;
    };
    auto idle_waiting = [&]() -> std::optional<Rational> {
        if (period < t) return std::nullopt;
        return e + p_idle * (period - t) / 1000;
    };

    SteadyState ss;
    switch (strategy.type) {
        case StrategyType::OnOff:
            ss = {on_off(), wake_time, wake_time};
            break;
        case StrategyType::IdleWaiting:
            ss = {idle_waiting(), t, t};
            break;
        case StrategyType::ClockAligned: {
            ss = {std::nullopt, t, t};
            if (period >= t) {
                const Rational f = clock_aligned_frequency(cycles, period, device, clock_mhz);
                const Rational stretched = inference_time(cycles, f);
                ss.energy_per_item = stretched * active_power(device, dyn_coeff, f) / 1000 +
                                     p_idle * (period - stretched) / 1000;
                ss.response_time = stretched;
            }
            break;
        }
        case StrategyType::Adaptive:
            if (const auto* pre = std::get_if<PredefinedThreshold>(&strategy.threshold)) {
                // A regular trace keeps the moving average at the period.
                ss = period <= pre->theta ? SteadyState{idle_waiting(), t, t}
                                          : SteadyState{on_off(), wake_time, wake_time};
            } else {
                // Learned decisions settle on the cheaper branch per gap; either may fire live.
                auto a = idle_waiting();
                auto b = on_off();
                std::optional<Rational> best = a;
                if (b && (!best || *b < *best)) best = b;
                ss = {best, wake_time, t};
            }
            break;
    }
    return ss;
}

Rational analytic_energy_per_item(const StrategyKind& strategy, const Rational& period, const EvalReport& report,
                                  const FpgaDevice& device) {
    const SteadyState ss =
        steady_state(strategy, period, Rational(report.cycles), report.dyn_coeff_sum, report.clock_mhz, device);
    if (!ss.energy_per_item) {
        throw PeriodTooShort(to_string(strategy), "period " + to_exact_string(period) + " ms < required " +
                                                      to_exact_string(ss.required_period) + " ms");
    }
    return *ss.energy_per_item;
}

BreakEven break_even_period(const EvalReport& report, const FpgaDevice& device) {
    if (report.p_idle <= 0) {
        return {Rational(0), true};
    }
    return {report.t_inf + device.config_energy() * 1000 / report.p_idle, false};
}

std::int64_t items_within_budget(const StrategyKind& strategy, const Rational& period, const Rational& budget,
                                 const EvalReport& report, const FpgaDevice& device) {
    if (budget <= 0) {
        throw DomainError("energy budget must be > 0");
    }
    const Rational per_item = analytic_energy_per_item(strategy, period, report, device);
    if (per_item <= 0) {
        throw DomainError("per-item energy is zero; item count is unbounded");
    }
    return floor_int(budget / per_item).convert_to<std::int64_t>();
}

Rational strategy_item_ratio(const StrategyKind& a, const StrategyKind& b, const Rational& period,
                             const Rational& budget, const EvalReport& report, const FpgaDevice& device) {
    const std::int64_t items_a = items_within_budget(a, period, budget, report, device);
    const std::int64_t items_b = items_within_budget(b, period, budget, report, device);
    if (items_b == 0) {
        throw DomainError("strategy " + to_string(b) + " completes no items within the budget");
    }
    return Rational(BigInt(items_a), BigInt(items_b));
}

Rational GapCostModel::idle_cost(const Rational& gap) const {
    return gap > t_inf ? Rational(p_idle * (gap - t_inf) / 1000) : Rational(0);
}

GapCostModel gap_cost_model(const EvalReport& report, const FpgaDevice& device) {
    return {report.e_inf, report.t_inf, report.p_idle, device.config_energy()};
}

Rational fixed_threshold_energy(const std::vector<Rational>& gaps, const GapCostModel& costs, const Rational& theta) {
    Rational total = 0;
    for (const auto& g : gaps) total += costs.cost(g, g <= theta);
    return total;
}

ThresholdChoice learn_threshold_offline(const std::vector<Rational>& gaps, const GapCostModel& costs) {
    if (gaps.empty()) throw EmptyTrace();
    std::vector<Rational> sorted = gaps;
    std::sort(sorted.begin(), sorted.end());

    const auto n = static_cast<long>(sorted.size());
    // theta below every gap: always power off.
    Rational base = costs.e_inf * n;
    ThresholdChoice best{sorted.front() / 2, base + costs.config_energy * n};

    Rational stay_on_sum = 0;
    long i = 0;
    while (i < n) {
        const Rational theta = sorted[static_cast<std::size_t>(i)];
        while (i < n && sorted[static_cast<std::size_t>(i)] == theta) {
            stay_on_sum += costs.idle_cost(theta);
            ++i;
        }
        Rational total = base + stay_on_sum + costs.config_energy * (n - i);
        if (total < best.total_energy) {
            best = {theta, std::move(total)};
        }
    }
    return best;
}

ThresholdChoice learn_threshold_offline(const std::vector<Rational>& gaps, const EvalReport& report,
                                        const FpgaDevice& device) {
    return learn_threshold_offline(gaps, gap_cost_model(report, device));
}

std::vector<Rational> generate_gaps(const Workload& workload, std::int64_t requests) {
    return std::visit(
        [&](const auto& w) -> std::vector<Rational> {
            using T = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<T, TraceWorkload>) {
                if (w.gaps.empty()) throw EmptyTrace();
                return w.gaps;
            } else {
                if (requests < 1) throw EmptyTrace();
                if constexpr (std::is_same_v<T, RegularWorkload>) {
                    return std::vector<Rational>(static_cast<std::size_t>(requests), w.period);
                } else {
                    std::mt19937_64 gen(w.seed);
                    std::vector<Rational> gaps;
                    gaps.reserve(static_cast<std::size_t>(requests));
                    const auto& p = w.params;
                    for (std::int64_t i = 0; i < requests; ++i) {
                        if (w.distribution == GapDistribution::Exponential) {
                            const double u = uniform01(gen);
                            gaps.push_back(microsecond_gap(-to_double(p.at("mean")) * std::log1p(-u)));
                        } else {
                            const bool is_short = uniform01(gen) < to_double(p.at("p_short"));
                            const double lo = to_double(p.at(is_short ? "short_min" : "long_min"));
                            const double hi = to_double(p.at(is_short ? "short_max" : "long_max"));
                            gaps.push_back(microsecond_gap(lo + uniform01(gen) * (hi - lo)));
                        }
                    }
                    return gaps;
                }
            }
        },
        workload);
}

SimResult simulate(const SimInputs& in, const FpgaDevice& device, const std::vector<Rational>& gaps) {
    if (gaps.empty()) throw EmptyTrace();
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        if (gaps[i] <= 0) throw NonPositiveGap(i + 1, to_exact_string(gaps[i]));
    }
    validate(in.strategy);

    SimResult res;
    res.strategy = to_string(in.strategy);
    res.requests = static_cast<std::int64_t>(gaps.size());

    Rational window = 0;
    for (const auto& g : gaps) window += g;
    const Rational nominal = in.nominal_period ? *in.nominal_period : Rational(window / res.requests);

    const Rational cycles(in.cycles);
    const StrategyType type = in.strategy.type;
    res.run_clock_mhz = type == StrategyType::ClockAligned
                            ? clock_aligned_frequency(cycles, nominal, device, in.clock_mhz)
                            : in.clock_mhz;
    const Rational t_run = inference_time(cycles, res.run_clock_mhz);
    const Rational e_run = t_run * active_power(device, in.dyn_coeff, res.run_clock_mhz) / 1000;
    const Rational p_idle = idle_power(device);
    const Rational e_config = device.config_energy();
    const GapCostModel costs{e_run, t_run, p_idle, e_config};

    // Adaptive state.
    const bool adaptive = type == StrategyType::Adaptive;
    const auto* learnable = std::get_if<LearnableThreshold>(&in.strategy.threshold);
    const bool learning = adaptive && learnable != nullptr;
    Rational theta = !adaptive ? Rational(0)
                     : learning ? learnable->theta0
                                : std::get<PredefinedThreshold>(in.strategy.threshold).theta;
    std::optional<Rational> gap_average;
    if (adaptive) {
        res.theta_trajectory.emplace_back(0, theta);
        res.hindsight_energy = Rational(0);
    }

    Rational energy = 0;
    bool on = type != StrategyType::OnOff;
    if (on) {
        energy += e_config;
        res.setup_energy = e_config;
        res.reconfigurations = 1;
    }

    auto stay_on = [&]() {
        switch (type) {
            case StrategyType::OnOff: return false;
            case StrategyType::IdleWaiting:
            case StrategyType::ClockAligned: return true;
            case StrategyType::Adaptive: return !gap_average || *gap_average <= theta;
        }
        return true;
    };
    auto idle_interval = [&](const Rational& from, const Rational& to) {
        if (!on) return;
        if (stay_on()) {
            energy += p_idle * (to - from) / 1000;
        } else {
            on = false;
        }
    };
    std::int64_t observed = 0;
    auto observe_gap = [&](const Rational& g) {
        ++observed;
        if (!adaptive) return;
        const bool classified_on = g <= theta;
        *res.hindsight_energy += costs.cost(g, classified_on);
        if (learning) {
            const bool best_on = costs.stay_on_is_best(g);
            if (classified_on != best_on) {
                // Aim just below g when powering off was right so the classifier flips.
                Rational target = best_on ? g : (g > kMicrosecond ? Rational(g - kMicrosecond) : Rational(g / 2));
                Rational next = round_toward(theta + learnable->eta * (target - theta), target);
                if (next <= 0) next = kMicrosecond;
                if (next != theta) {
                    theta = next;
                    res.theta_trajectory.emplace_back(observed, theta);
                }
            }
        }
        gap_average = gap_average ? round_to_grid(*gap_average * Rational(4, 5) + g / 5, kNanosecond) : g;
    };

    std::deque<Rational> in_system;
    Rational arrival = 0;
    Rational free_at = 0;
    for (std::size_t k = 0; k < gaps.size(); ++k) {
        if (arrival >= free_at) idle_interval(free_at, arrival);
        if (k > 0) observe_gap(gaps[k - 1]);

        Rational start = arrival > free_at ? arrival : free_at;
        if (!on) {
            energy += e_config;
            ++res.reconfigurations;
            on = true;
            start += device.t_config;
        }
        const Rational done = start + t_run;
        energy += e_run;
        res.busy_time += t_run;

        while (!in_system.empty() && in_system.front() <= arrival) in_system.pop_front();
        in_system.push_back(done);
        res.max_backlog = std::max<std::int64_t>(res.max_backlog, static_cast<std::int64_t>(in_system.size()));
        if (in.deadline && done - arrival > *in.deadline) ++res.missed_deadlines;

        free_at = done;
        arrival += gaps[k];
    }
    if (window >= free_at) idle_interval(free_at, window);
    observe_gap(gaps.back());

    res.window = window > free_at ? window : free_at;
    res.items_processed = res.requests;
    res.total_energy = energy;
    res.energy_per_item = energy / res.items_processed;
    res.steady_energy_per_item = (energy - res.setup_energy) / res.items_processed;
    return res;
}

SimResult simulate(const NetworkModel& model, const FpgaDevice& device, const CandidateConfig& config,
                   const std::vector<Rational>& gaps, const std::optional<Rational>& deadline) {
    const CostTotals totals = sum_costs(model, config);
    SimInputs in{totals.cycles, totals.dyn_coeff, config.clock_mhz, config.strategy, deadline, std::nullopt};
    return simulate(in, device, gaps);
}

json to_json(const SimResult& r) {
    using detail::approx;
    using detail::exact;
    json trajectory = json::array();
    for (const auto& [index, theta] : r.theta_trajectory) {
        trajectory.push_back({index, approx(theta)});
    }
    return {{"strategy", r.strategy},
            {"requests", r.requests},
            {"items_processed", r.items_processed},
            {"total_energy_mj", approx(r.total_energy)},
            {"energy_per_item_mj", approx(r.energy_per_item)},
            {"setup_energy_mj", approx(r.setup_energy)},
            {"steady_energy_per_item_mj", approx(r.steady_energy_per_item)},
            {"missed_deadlines", r.missed_deadlines},
            {"max_backlog", r.max_backlog},
            {"reconfigurations", r.reconfigurations},
            {"run_clock_mhz", approx(r.run_clock_mhz)},
            {"window_ms", approx(r.window)},
            {"busy_ms", approx(r.busy_time)},
            {"hindsight_energy_mj", approx(r.hindsight_energy)},
            {"theta_trajectory", std::move(trajectory)},
            {"exact",
             {{"total_energy_mj", exact(r.total_energy)},
              {"energy_per_item_mj", exact(r.energy_per_item)},
              {"steady_energy_per_item_mj", exact(r.steady_energy_per_item)}}}};
}

std::string theta_csv(const SimResult& r) {
    std::string out = "event,theta_ms\n";
    for (const auto& [index, theta] : r.theta_trajectory) {
        out += std::to_string(index) + "," + to_exact_string(theta) + "\n";
    }
    return out;
}

}  // namespace fpgadse
