#include "fpgadse/errors.hpp"
#include "fpgadse/generator.hpp"
#include "fpgadse/workload.hpp"
#include "random_space.hpp"
#include "support.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

using namespace fpgadse;
using namespace fpgadse::testing;

namespace {

struct Example {
    Catalog catalog = load_catalog(data_path("example/catalog.json"));
    NetworkModel model = load_model(data_path("example/model.json"));
    FpgaDevice device = load_device(data_path("example/device.json"));
    ApplicationSpec appspec = load_appspec(data_path("example/appspec_regular40.json"));
};

SpaceOptions fixture_options() {
    SpaceOptions o;
    o.clocks = std::vector<Rational>{Rational(50), Rational(100)};
    o.strategies = std::vector<StrategyKind>{StrategyKind::on_off(), StrategyKind::idle_waiting()};
    return o;
}

std::optional<Rational> best_objective(const DesignSpace& space, const NetworkModel& model, const FpgaDevice& device,
                                       const ApplicationSpec& appspec, bool bnb, SearchOutcome* out = nullptr) {
    try {
        SearchOutcome o = bnb ? search_branch_and_bound(space, model, device, appspec)
                              : search_exhaustive(space, model, device, appspec);
        if (out) *out = o;
        return o.best->objective;
    } catch (const NoFeasibleCandidate& e) {
        if (out) *out = e.outcome();
        return std::nullopt;
    }
}

}  // namespace

TEST_CASE("16-candidate fixture matches a hand enumeration") {
    const Example ex;
    const DesignSpace space = enumerate_space(ex.catalog, ex.model, ex.device, fixture_options());
    REQUIRE(space.size() == 16);

    // Independent brute force over catalog lookups and estimate().
    std::optional<Rational> best;
    CandidateConfig best_config;
    for (const char* lstm : {"lstm_pipe", "lstm_seq"}) {
        for (const char* act : {"hsig_comb", "hsig_seq"}) {
            for (int clock : {50, 100}) {
                for (const auto& s : {StrategyKind::on_off(), StrategyKind::idle_waiting()}) {
                    CandidateConfig c;
                    c.assignment.push_back({*ex.catalog.find(TemplateKind::LSTMCell, lstm),
                                            *ex.catalog.find(TemplateKind::Activation, act)});
                    c.clock_mhz = clock;
                    c.strategy = s;
                    const EvalReport r = estimate(ex.model, ex.device, c, ex.appspec);
                    if (!r.feasible) continue;
                    if (!best || *r.energy_per_item < *best) {
                        best = *r.energy_per_item;
                        best_config = c;
                    }
                }
            }
        }
    }
    REQUIRE(best.has_value());
    for (bool bnb : {false, true}) {
        SearchOutcome o;
        CHECK(best_objective(space, ex.model, ex.device, ex.appspec, bnb, &o) == best);
        CHECK(o.best->config == best_config);
        CHECK(o.explored + o.pruned == 16);
    }
}

TEST_CASE("single-candidate space") {
    const Example ex;
    SpaceOptions o;
    o.clocks = std::vector<Rational>{Rational(100)};
    o.strategies = std::vector<StrategyKind>{StrategyKind::idle_waiting()};
    Catalog c = ex.catalog;
    std::erase_if(c.profiles, [](const TemplateProfile& p) {
        return p.variant_id == "lstm_seq" || p.variant_id == "hsig_seq";
    });
    const DesignSpace space = enumerate_space(c, ex.model, ex.device, o);
    REQUIRE(space.size() == 1);
    const SearchOutcome ex_out = search_exhaustive(space, ex.model, ex.device, ex.appspec);
    const SearchOutcome bnb = search_branch_and_bound(space, ex.model, ex.device, ex.appspec);
    CHECK(ex_out.best->config == make_candidate(space, {0}, 0, 0));
    CHECK(bnb.explored == 1);
    CHECK(bnb.pruned == 0);
    CHECK(bnb.best->config == ex_out.best->config);
}

TEST_CASE("all candidates infeasible on DSP") {
    const Example ex;
    const FpgaDevice starved = load_device(data_path("fixtures/device_low_dsp.json"));
    const DesignSpace space = enumerate_space(ex.catalog, ex.model, starved);
    for (bool bnb : {false, true}) {
        try {
            bnb ? search_branch_and_bound(space, ex.model, starved, ex.appspec)
                : search_exhaustive(space, ex.model, starved, ex.appspec);
            FAIL("expected NoFeasibleCandidate");
        } catch (const NoFeasibleCandidate& e) {
            REQUIRE(e.outcome().least_violating.has_value());
            CHECK(e.outcome().least_violating->report.violates("dsp"));
            CHECK(e.outcome().violation_counts.at("dsp") == space.size());
            CHECK(std::string(e.what()).find("dsp") != std::string::npos);
        }
    }
}

TEST_CASE("branch-and-bound equals exhaustive search on random spaces") {
    for (std::uint64_t seed = 100; seed < 160; ++seed) {
        const RandomScenario s = random_scenario(seed, 3000);
        SearchOutcome bnb_out;
        const auto ex = best_objective(s.space, s.model, s.device, s.appspec, false);
        const auto bnb = best_objective(s.space, s.model, s.device, s.appspec, true, &bnb_out);
        INFO("seed " << seed);
        REQUIRE(ex == bnb);
        REQUIRE(bnb_out.explored + bnb_out.pruned == s.space.size());
    }
}

TEST_CASE("partial lower bound is admissible") {
    std::mt19937_64 gen(99);
    int checked = 0;
    for (std::uint64_t seed = 200; seed < 240; ++seed) {
        const RandomScenario s = random_scenario(seed, 3000);
        const std::size_t layers = s.model.layers.size();
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t ci = gen() % s.space.clocks.size();
            const std::size_t si = gen() % s.space.strategies.size();
            const std::size_t depth = gen() % (layers + 1);
            std::vector<std::size_t> fixed;
            for (std::size_t l = 0; l < depth; ++l) fixed.push_back(gen() % s.space.per_layer[l].size());
            const auto bound = partial_lower_bound(s.space, s.model, s.device, s.appspec, ci, si, fixed);
            for (int k = 0; k < 20; ++k) {
                std::vector<std::size_t> full = fixed;
                for (std::size_t l = depth; l < layers; ++l) full.push_back(gen() % s.space.per_layer[l].size());
                const CandidateConfig c = make_candidate(s.space, full, ci, si);
                EvalReport r;
                try {
                    r = estimate(s.model, s.device, c, s.appspec);
                } catch (const InfeasibleFrequency&) {
                    continue;
                }
                if (!r.feasible) continue;
                // A feasible completion exists, so the subtree cannot be pruned as infeasible.
                REQUIRE(bound.has_value());
                REQUIRE(*bound <= *objective_value(r, s.appspec.objective));
                ++checked;
            }
        }
    }
    CHECK(checked > 500);
}

TEST_CASE("a dominating variant prunes at least half the space") {
    const Catalog c = load_catalog(data_path("fixtures/catalog_dominance.json"));
    const NetworkModel m = load_model(data_path("fixtures/model_dominance.json"));
    const Example ex;
    const DesignSpace space = enumerate_space(c, m, ex.device);
    const SearchOutcome o = search_branch_and_bound(space, m, ex.device, ex.appspec);
    CHECK(o.pruned * 2 >= space.size());
    CHECK(o.explored + o.pruned == space.size());
    for (const auto& a : o.best->config.assignment) CHECK(a.layer.variant_id == "fc_a_best");
    CHECK(o.best->objective == search_exhaustive(space, m, ex.device, ex.appspec).best->objective);
}

TEST_CASE("pareto frontier matches the quadratic oracle") {
    std::mt19937_64 gen(31);
    std::uniform_int_distribution<int> v(0, 30);
    for (int cloud = 0; cloud < 20; ++cloud) {
        std::vector<ParetoPoint> pts;
        for (std::size_t i = 0; i < 100; ++i) pts.push_back({Rational(v(gen), 3), Rational(v(gen), 7), v(gen), i});
        std::vector<std::size_t> oracle;
        for (const auto& p : pts) {
            bool dominated = false;
            for (const auto& q : pts) {
                const bool le = q.energy_per_item <= p.energy_per_item && q.t_inf <= p.t_inf && q.lut <= p.lut;
                const bool lt = q.energy_per_item < p.energy_per_item || q.t_inf < p.t_inf || q.lut < p.lut;
                dominated = dominated || (le && lt);
            }
            if (!dominated) oracle.push_back(p.id);
        }
        const auto frontier = pareto_frontier(pts);
        std::vector<std::size_t> got;
        for (const auto& p : frontier) got.push_back(p.id);
        for (std::size_t i = 1; i < frontier.size(); ++i) {
            REQUIRE(frontier[i - 1].energy_per_item <= frontier[i].energy_per_item);
        }
        std::sort(got.begin(), got.end());
        REQUIRE(got == oracle);
    }
    const ParetoPoint a{1, 1, 1, 0}, b{2, 2, 2, 1};
    CHECK(pareto_frontier({a}).size() == 1);
    CHECK(pareto_frontier({a, b}).front().id == 0);
    CHECK(pareto_frontier({a, b}).size() == 1);
}

TEST_CASE("search output does not depend on the number of jobs") {
    for (std::uint64_t seed : {7u, 8u, 9u}) {
        const RandomScenario s = random_scenario(seed);
        SearchOptions one, four;
        four.jobs = 4;
        nlohmann::json a, b;
        try {
            a = to_json(search_exhaustive(s.space, s.model, s.device, s.appspec, one));
        } catch (const NoFeasibleCandidate& e) {
            a = to_json(e.outcome());
        }
        try {
            b = to_json(search_exhaustive(s.space, s.model, s.device, s.appspec, four));
        } catch (const NoFeasibleCandidate& e) {
            b = to_json(e.outcome());
        }
        CHECK(a.dump() == b.dump());
    }
}

TEST_CASE("ranked list and pareto set of the exhaustive search") {
    const Example ex;
    const DesignSpace space = enumerate_space(ex.catalog, ex.model, ex.device);
    SearchOptions o;
    o.top_k = 3;
    const SearchOutcome out = search_exhaustive(space, ex.model, ex.device, ex.appspec, o);
    REQUIRE(out.ranked.size() == 3);
    CHECK(out.ranked[0].config == out.best->config);
    CHECK(*out.ranked[0].objective <= *out.ranked[1].objective);
    CHECK_FALSE(out.pareto.empty());
    const std::string csv = pareto_csv(out);
    CHECK(csv.rfind("energy_per_item_mj,t_inf_ms,lut,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(out.pareto.size() + 1));
    const std::string ranked = ranked_csv(out);
    CHECK(std::count(ranked.begin(), ranked.end(), '\n') == 4);
}

TEST_CASE("space size cap") {
    const Example ex;
    const DesignSpace space = enumerate_space(ex.catalog, ex.model, ex.device);
    SearchOptions o;
    o.cap = 10;
    try {
        search_exhaustive(space, ex.model, ex.device, ex.appspec, o);
        FAIL("expected SpaceTooLarge");
    } catch (const SpaceTooLarge& e) {
        CHECK(e.size() == space.size());
    }
    CHECK_THROWS_AS(search_branch_and_bound(space, ex.model, ex.device, ex.appspec, o), SpaceTooLarge);
}

TEST_CASE("tightening a constraint never grows the feasible set") {
    for (std::uint64_t seed = 300; seed < 320; ++seed) {
        RandomScenario s = random_scenario(seed, 2000);
        SearchOutcome loose, tight;
        best_objective(s.space, s.model, s.device, s.appspec, false, &loose);
        s.appspec.latency_deadline = s.appspec.latency_deadline ? *s.appspec.latency_deadline / 2 : Rational(20);
        s.device.capacities.lut = s.device.capacities.lut * 3 / 4;
        best_objective(s.space, s.model, s.device, s.appspec, false, &tight);
        REQUIRE(tight.feasible_evaluated <= loose.feasible_evaluated);
    }
}

TEST_CASE("maximum efficiency is minimum energy per inference") {
    Example ex;
    ex.appspec.objective = Objective::MaxEnergyEfficiency;
    const DesignSpace space = enumerate_space(ex.catalog, ex.model, ex.device);
    SearchOptions o;
    o.top_k = 1000;
    const SearchOutcome out = search_exhaustive(space, ex.model, ex.device, ex.appspec, o);
    Rational best_eff = 0;
    for (const auto& e : out.ranked) best_eff = std::max(best_eff, e.report.efficiency_gops_per_w);
    CHECK(out.best->report.efficiency_gops_per_w == best_eff);
    CHECK(out.ranked.size() == out.feasible_evaluated);
}

TEST_CASE("space enumeration") {
    const Example ex;
    const DesignSpace space = enumerate_space(ex.catalog, ex.model, ex.device);
    CHECK(space.per_layer.at(0).size() == 4);
    // f_min 10 in steps of 25, capped by the device at 100.
    CHECK(space.clocks == std::vector<Rational>{10, 35, 60, 85});
    CHECK(space.strategies.size() == 4);
    CHECK(space.size() == 64);

    NetworkModel attention = ex.model;
    attention.layers[0].kind = TemplateKind::Attention;
    CHECK_THROWS_AS(enumerate_space(ex.catalog, attention, ex.device), UncoveredLayerKind);
    NetworkModel tanh_layer = ex.model;
    tanh_layer.layers[0].activation = ActivationFn::Tanh;
    CHECK(enumerate_space(ex.catalog, tanh_layer, ex.device).per_layer[0].size() == 2);
}

TEST_CASE("candidate from an assignment string") {
    const Example ex;
    const auto c = candidate_from_assignment(ex.catalog, ex.model, ex.device, "lstm_seq+hsig_seq", std::nullopt,
                                             StrategyKind::on_off());
    CHECK(c.assignment[0].layer.variant_id == "lstm_seq");
    CHECK(c.assignment[0].activation->variant_id == "hsig_seq");
    CHECK(c.clock_mhz == 100);
    CHECK_THROWS_AS(candidate_from_assignment(ex.catalog, ex.model, ex.device, "nope", std::nullopt,
                                              StrategyKind::on_off()),
                    ValidationError);
}
