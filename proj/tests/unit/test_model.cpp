#include "fpgadse/errors.hpp"
#include "fpgadse/model.hpp"
#include "support.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <algorithm>

using namespace fpgadse;
using namespace fpgadse::testing;
using nlohmann::json;

namespace {

Layer fc(std::int64_t ops) {
    Layer l;
    l.kind = TemplateKind::FullyConnected;
    l.work_units = ops / 2;
    l.op_count = ops;
    return l;
}

json device_doc() {
    return json::parse(R"({"name": "d", "capacities": {"lut": 10, "ff": 10, "dsp": 1, "bram": 1},
                           "p_static": 100, "f_min": 10, "f_max_device": 100, "t_config": 20, "p_config": 200})");
}

}  // namespace

TEST_CASE("ops_count sums op counts") {
    CHECK(ops_count({"m", {fc(2000)}}) == 2000);
    NetworkModel m{"m", {fc(2000), fc(3000), fc(500)}};
    CHECK(ops_count(m) == 5500);
    std::reverse(m.layers.begin(), m.layers.end());
    CHECK(ops_count(m) == 5500);
    Layer mac1000 = fc(2000);
    mac1000.work_units = 1000;
    CHECK(ops_count({"m", {mac1000}}) == 2 * mac1000.work_units);
}

TEST_CASE("model validation") {
    CHECK_NOTHROW(validate(NetworkModel{"m", {fc(10)}}));
    CHECK_THROWS_AS(validate(NetworkModel{"m", {}}), ValidationError);
    Layer bad = fc(10);
    bad.op_count = 2;
    bad.work_units = 5;
    CHECK_THROWS_AS(validate(NetworkModel{"m", {bad}}), ValidationError);
    Layer dims = fc(10);
    dims.dims["outputs"] = 0;
    CHECK_THROWS_AS(validate(NetworkModel{"m", {dims}}), ValidationError);
}

TEST_CASE("activation units default to outputs x timesteps") {
    Layer l = fc(10);
    CHECK(l.activation_units() == 1);
    l.dims = {{"outputs", 20}, {"timesteps", 4}};
    CHECK(l.activation_units() == 80);
    l.dims["activations"] = 7;
    CHECK(l.activation_units() == 7);
}

TEST_CASE("device loading and frequency range") {
    const FpgaDevice d = parse_device(device_doc());
    CHECK(d.f_min == 10);
    CHECK(d.c_idle_dyn == 0);
    CHECK(d.config_energy() == 4);
    json bad = device_doc();
    bad["f_min"] = 200;
    try {
        parse_device(bad);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("f_min") != std::string::npos);
    }
    bad = device_doc();
    bad["t_config"] = -1;
    CHECK_THROWS_AS(parse_device(bad), ValidationError);
}

TEST_CASE("shipped example files load and round-trip") {
    const NetworkModel m = load_model(data_path("example/model.json"));
    const FpgaDevice d = load_device(data_path("example/device.json"));
    const ApplicationSpec a = load_appspec(data_path("example/appspec_regular40.json"));
    CHECK(std::get<RegularWorkload>(a.workload).period == 40);
    CHECK(a.objective == Objective::MinEnergyPerItem);
    CHECK(parse_model(to_json(m)) == m);
    CHECK(parse_device(to_json(d)) == d);
    CHECK(parse_appspec(to_json(a)) == a);

    const ApplicationSpec t = load_appspec(data_path("example/appspec_trace.json"));
    CHECK(std::get<TraceWorkload>(t.workload).gaps.size() == 16);
    CHECK(parse_appspec(to_json(t)) == t);
    const ApplicationSpec b = load_appspec(data_path("example/appspec_bimodal.json"));
    CHECK(parse_appspec(to_json(b)) == b);
}

TEST_CASE("appspec invariants") {
    json doc = json::parse(R"({"workload": {"kind": "Regular", "period": 0}, "objective": "MinLatency"})");
    CHECK_THROWS_AS(parse_appspec(doc), ValidationError);
    doc = json::parse(R"({"workload": {"kind": "Trace", "gaps": [1, -2]}, "objective": "MinLatency"})");
    CHECK_THROWS_AS(parse_appspec(doc), NonPositiveGap);
    doc = json::parse(R"({"workload": {"kind": "Regular", "period": 5}, "objective": "Fastest"})");
    CHECK_THROWS_AS(parse_appspec(doc), ValidationError);
    doc = json::parse(R"({"workload": {"kind": "Regular", "period": 5}, "latency_deadline": 0,
                          "objective": "MinLatency"})");
    CHECK_THROWS_AS(parse_appspec(doc), ValidationError);
}

TEST_CASE("nominal period") {
    CHECK(nominal_period(RegularWorkload{Rational(40)}) == 40);
    CHECK(nominal_period(TraceWorkload{{Rational(10), Rational(20), Rational(60)}}) == 30);
    StochasticWorkload s{GapDistribution::Exponential, {{"mean", Rational(25)}}, 1};
    CHECK(nominal_period(s) == 25);
    StochasticWorkload b{GapDistribution::BimodalUniform,
                         {{"p_short", Rational(1, 2)},
                          {"short_min", Rational(10)},
                          {"short_max", Rational(20)},
                          {"long_min", Rational(100)},
                          {"long_max", Rational(200)}},
                         1};
    CHECK(nominal_period(b) == Rational(165, 2));
}

TEST_CASE("trace text parsing") {
    const auto gaps = parse_trace_text("# header\n10\n\n12.5ms\n  7  # inline\n");
    REQUIRE(gaps.size() == 3);
    CHECK(gaps[1] == Rational(25, 2));
    try {
        parse_trace_text("10\n# c\n0\n");
        FAIL("expected NonPositiveGap");
    } catch (const NonPositiveGap& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_trace_text("# nothing\n"), EmptyTrace);
    CHECK_THROWS_AS(parse_trace_text("ten\n"), ParseError);
    CHECK_THROWS_AS(load_trace(data_path("fixtures/trace_zero_gap.txt")), NonPositiveGap);
}

TEST_CASE("workload spec strings") {
    CHECK(std::get<RegularWorkload>(parse_workload_spec("regular:40ms")).period == 40);
    CHECK(std::get<RegularWorkload>(parse_workload_spec("regular:2.5")).period == Rational(5, 2));
    const auto e = std::get<StochasticWorkload>(parse_workload_spec("exp:25,9"));
    CHECK(e.params.at("mean") == 25);
    CHECK(e.seed == 9);
    const auto b = std::get<StochasticWorkload>(parse_workload_spec("bimodal:0.5,5,20,100,300,7"));
    CHECK(b.params.at("long_max") == 300);
    CHECK(std::get<TraceWorkload>(parse_workload_spec("trace:" + data_path("example/trace_bursty.txt"))).gaps.size() ==
          16);
    CHECK_THROWS_AS(parse_workload_spec("regular"), ParseError);
    CHECK_THROWS_AS(parse_workload_spec("regular:x"), ParseError);
    CHECK_THROWS_AS(parse_workload_spec("exp:25"), ParseError);
    CHECK_THROWS_AS(parse_workload_spec("poisson:3,1"), ParseError);
    CHECK_THROWS_AS(parse_workload_spec("trace:" + data_path("fixtures/trace_zero_gap.txt")), NonPositiveGap);
}
