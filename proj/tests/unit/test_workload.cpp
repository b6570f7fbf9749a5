#include "fpgadse/errors.hpp"
#include "fpgadse/workload.hpp"
#include "support.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <random>

using namespace fpgadse;
using namespace fpgadse::testing;

namespace {

EvalReport example_report(const Rational& period = 40) {
    return estimate(example_model(), example_device(), example_config(), regular(period));
}

std::vector<Rational> repeat(const Rational& gap, int n) { return std::vector<Rational>(n, gap); }

SimResult run(const StrategyKind& s, const std::vector<Rational>& gaps, std::optional<Rational> deadline = {}) {
    return simulate(example_model(), example_device(), example_config(s), gaps, deadline);
}

StochasticWorkload bimodal(std::uint64_t seed) {
    return {GapDistribution::BimodalUniform,
            {{"p_short", Rational(1, 2)},
             {"short_min", Rational(5)},
             {"short_max", Rational(20)},
             {"long_min", Rational(100)},
             {"long_max", Rational(300)}},
            seed};
}

}  // namespace

TEST_CASE("analytic per-item energy closed forms") {
    const EvalReport r = example_report();
    const FpgaDevice d = example_device();
    CHECK(analytic_energy_per_item(StrategyKind::on_off(), 40, r, d) == Rational(11, 2));
    CHECK(analytic_energy_per_item(StrategyKind::idle_waiting(), 40, r, d) == 5);
    CHECK(clock_aligned_frequency(500000, 40, d, 100) == Rational(25, 2));
    CHECK(analytic_energy_per_item(StrategyKind::clock_aligned(), 40, r, d) == 5);
    CHECK(analytic_energy_per_item(StrategyKind::adaptive_predefined(45), 40, r, d) == 5);
    CHECK(analytic_energy_per_item(StrategyKind::adaptive_predefined(30), 40, r, d) == Rational(11, 2));
}

TEST_CASE("period too short names the strategy") {
    const EvalReport r = example_report();
    const FpgaDevice d = example_device();
    try {
        analytic_energy_per_item(StrategyKind::on_off(), 24, r, d);
        FAIL("expected PeriodTooShort");
    } catch (const PeriodTooShort& e) {
        CHECK(e.strategy() == "OnOff");
    }
    CHECK_NOTHROW(analytic_energy_per_item(StrategyKind::on_off(), 25, r, d));
    CHECK_THROWS_AS(analytic_energy_per_item(StrategyKind::idle_waiting(), 4, r, d), PeriodTooShort);
}

TEST_CASE("clock-aligned equals idle-waiting without idle dynamic power, beats it otherwise") {
    FpgaDevice d = example_device();
    const StrategyKind ca = StrategyKind::clock_aligned(), iw = StrategyKind::idle_waiting();
    for (int period = 5; period <= 200; period += 5) {
        const EvalReport r = example_report(period);
        REQUIRE(analytic_energy_per_item(ca, period, r, d) == analytic_energy_per_item(iw, period, r, d));
    }
    d.c_idle_dyn = 30;
    for (int period = 6; period <= 200; period += 5) {
        const EvalReport r = estimate(example_model(), d, example_config(), regular(period));
        REQUIRE(analytic_energy_per_item(ca, period, r, d) < analytic_energy_per_item(iw, period, r, d));
    }
}

TEST_CASE("break-even period") {
    const FpgaDevice d = example_device();
    const BreakEven be = break_even_period(example_report(), d);
    CHECK_FALSE(be.infinite);
    CHECK(be.period == 45);

    FpgaDevice free_config = d;
    free_config.p_config = 0;
    CHECK(break_even_period(example_report(), free_config).period == 5);

    FpgaDevice no_idle = d;
    no_idle.p_static = 0;
    const EvalReport r = estimate(example_model(), no_idle, example_config(), regular(40));
    CHECK(break_even_period(r, no_idle).infinite);
}

TEST_CASE("crossover around the break-even period") {
    const FpgaDevice d = example_device();
    for (int p : {30, 35, 40, 44, 45, 46, 50, 60}) {
        const EvalReport r = example_report(p);
        const Rational iw = analytic_energy_per_item(StrategyKind::idle_waiting(), p, r, d);
        const Rational oo = analytic_energy_per_item(StrategyKind::on_off(), p, r, d);
        if (p < 45) CHECK(iw < oo);
        if (p == 45) CHECK(iw == oo);
        if (p > 45) CHECK(iw > oo);
    }
}

TEST_CASE("items within a budget") {
    const EvalReport r = example_report();
    const FpgaDevice d = example_device();
    CHECK(items_within_budget(StrategyKind::idle_waiting(), 40, 1000, r, d) == 200);
    CHECK(items_within_budget(StrategyKind::on_off(), 40, 1000, r, d) == 181);
    const Rational ratio =
        strategy_item_ratio(StrategyKind::idle_waiting(), StrategyKind::on_off(), 40, 1000, r, d);
    CHECK(ratio == Rational(200, 181));
    CHECK(strategy_item_ratio(StrategyKind::idle_waiting(), StrategyKind::clock_aligned(), 40, 1000, r, d) == 1);
}

TEST_CASE("simulated totals on the regular 40 ms trace") {
    const auto gaps = repeat(40, 100);
    const SimResult iw = run(StrategyKind::idle_waiting(), gaps);
    CHECK(iw.total_energy == 504);
    CHECK(iw.energy_per_item == Rational(504, 100));
    CHECK(iw.steady_energy_per_item == 5);
    CHECK(iw.reconfigurations == 1);
    CHECK(iw.items_processed == 100);

    const SimResult oo = run(StrategyKind::on_off(), gaps);
    CHECK(oo.total_energy == 550);
    CHECK(oo.reconfigurations == 100);
    CHECK(oo.steady_energy_per_item == Rational(11, 2));

    const SimResult ca = run(StrategyKind::clock_aligned(), gaps);
    CHECK(ca.steady_energy_per_item == 5);
    CHECK(ca.run_clock_mhz == Rational(25, 2));
}

TEST_CASE("single request costs the same under both strategies") {
    const std::vector<Rational> gaps{Rational(5)};
    const SimResult iw = run(StrategyKind::idle_waiting(), gaps);
    const SimResult oo = run(StrategyKind::on_off(), gaps);
    CHECK(iw.total_energy == oo.total_energy);
    CHECK(iw.total_energy == Rational(11, 2));
}

TEST_CASE("analytic and simulated steady state agree exactly") {
    const FpgaDevice d = example_device();
    for (int p : {25, 30, 40, 45, 60, 90}) {
        const EvalReport r = example_report(p);
        for (const auto& s : {StrategyKind::on_off(), StrategyKind::idle_waiting(), StrategyKind::clock_aligned()}) {
            const SimResult sim = run(s, repeat(p, 50));
            REQUIRE(sim.steady_energy_per_item == analytic_energy_per_item(s, p, r, d));
            REQUIRE(sim.energy_per_item * sim.items_processed == sim.total_energy);
        }
    }
}

TEST_CASE("backlog and deadlines") {
    // Gaps shorter than t_inf queue work; OnOff also pays the wake-up.
    const SimResult iw = run(StrategyKind::idle_waiting(), repeat(4, 20), Rational(6));
    CHECK(iw.max_backlog >= 2);
    CHECK(iw.missed_deadlines > 0);
    const SimResult oo = run(StrategyKind::on_off(), repeat(40, 5), Rational(20));
    CHECK(oo.missed_deadlines == 5);
    const SimResult ok = run(StrategyKind::idle_waiting(), repeat(40, 5), Rational(5));
    CHECK(ok.missed_deadlines == 0);
}

TEST_CASE("gap generation is seeded and on the microsecond grid") {
    const auto a = generate_gaps(bimodal(3), 1000);
    const auto b = generate_gaps(bimodal(3), 1000);
    const auto c = generate_gaps(bimodal(4), 1000);
    CHECK(a == b);
    CHECK(a != c);
    for (const auto& g : a) {
        REQUIRE(g > 0);
        REQUIRE(denominator(Rational(g * 1000)) == 1);
        REQUIRE(((g >= 5 && g <= 20) || (g >= 100 && g <= 300)));
    }
    const auto e = generate_gaps(StochasticWorkload{GapDistribution::Exponential, {{"mean", Rational(30)}}, 1}, 5000);
    Rational sum = 0;
    for (const auto& g : e) sum += g;
    CHECK(to_double(sum / 5000) == doctest::Approx(30).epsilon(0.05));
    CHECK(generate_gaps(RegularWorkload{Rational(40)}, 3) == repeat(40, 3));
    CHECK_THROWS_AS(simulate(example_model(), example_device(), example_config(), {}), EmptyTrace);
}

TEST_CASE("offline threshold learning") {
    const EvalReport r = example_report();
    const FpgaDevice d = example_device();
    const GapCostModel costs = gap_cost_model(r, d);

    std::vector<Rational> below{10, 20, 30, 44};
    CHECK(learn_threshold_offline(below, r, d).theta >= 44);
    std::vector<Rational> above{50, 80, 200};
    CHECK(learn_threshold_offline(above, r, d).theta < 50);

    std::vector<Rational> mixed = repeat(10, 50);
    const auto longs = repeat(200, 50);
    mixed.insert(mixed.end(), longs.begin(), longs.end());
    const ThresholdChoice t = learn_threshold_offline(mixed, r, d);
    CHECK(t.theta >= 10);
    CHECK(t.theta < 200);
    // Oracle: per-gap best decision is attainable by a separating threshold.
    Rational best = 0;
    for (const auto& g : mixed) best += std::min(costs.cost(g, true), costs.cost(g, false));
    CHECK(t.total_energy == best);
    CHECK(t.total_energy == fixed_threshold_energy(mixed, costs, t.theta));
    CHECK_THROWS_AS(learn_threshold_offline({}, r, d), EmptyTrace);
}

TEST_CASE("offline threshold matches a brute-force sweep") {
    const EvalReport r = example_report();
    const GapCostModel costs = gap_cost_model(r, example_device());
    std::mt19937_64 gen(23);
    std::uniform_int_distribution<int> gap(1, 120);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Rational> gaps;
        for (int i = 0; i < 40; ++i) gaps.emplace_back(gap(gen));
        const ThresholdChoice t = learn_threshold_offline(gaps, costs);
        // Every theta in [0, 121) on a 1/4 ms grid.
        for (int q = 0; q < 484; ++q) {
            REQUIRE(t.total_energy <= fixed_threshold_energy(gaps, costs, Rational(q, 4)));
        }
    }
}

TEST_CASE("adaptive policies") {
    const auto gaps = repeat(40, 300);
    const SimResult pre = run(StrategyKind::adaptive_predefined(45), gaps);
    const SimResult iw = run(StrategyKind::idle_waiting(), gaps);
    CHECK(pre.total_energy == iw.total_energy);

    const SimResult learn = run(StrategyKind::adaptive_learnable(10, Rational(1, 10)), gaps);
    REQUIRE_FALSE(learn.theta_trajectory.empty());
    CHECK(learn.theta_trajectory.back().second >= 40);
    REQUIRE(learn.hindsight_energy.has_value());
    CHECK(learn.total_energy < run(StrategyKind::on_off(), gaps).total_energy);
    CHECK(run(StrategyKind::adaptive_learnable(10, Rational(1, 10)), gaps) == learn);
    CHECK_THROWS_AS(validate(StrategyKind::adaptive_learnable(10, 0)), ValidationError);
    CHECK_THROWS_AS(validate(StrategyKind::adaptive_predefined(0)), ValidationError);
}

TEST_CASE("strategy strings") {
    CHECK(parse_strategy("onoff") == StrategyKind::on_off());
    CHECK(parse_strategy("IdleWaiting") == StrategyKind::idle_waiting());
    CHECK(parse_strategy("adaptive:predefined:30") == StrategyKind::adaptive_predefined(30));
    CHECK(parse_strategy("adaptive:learnable:10:0.2") == StrategyKind::adaptive_learnable(10, Rational(1, 5)));
    CHECK(parse_strategy("adaptive") == default_adaptive());
    CHECK_THROWS(parse_strategy("sleepy"));
    CHECK(to_string(StrategyKind::adaptive_predefined(30)) == "Adaptive(Predefined,theta=30)");
}
