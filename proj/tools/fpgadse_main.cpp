#include "fpgadse/activation.hpp"
#include "fpgadse/catalog.hpp"
#include "fpgadse/errors.hpp"
#include "fpgadse/estimator.hpp"
#include "fpgadse/generator.hpp"
#include "fpgadse/model.hpp"
#include "fpgadse/strategy.hpp"
#include "fpgadse/workload.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace fpgadse;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit : int {
    kOk = 0,
    kIo = 1,
    kInvalid = 2,
    kInfeasible = 3,
    kNoFeasible = 4,
    kTooLarge = 5,
    kUsage = 64,
    kData = 65,
};

class UsageError : public Error {
public:
    using Error::Error;
};

struct Inputs {
    std::string catalog;
    std::string model;
    std::string device;
    std::string appspec;
};

struct Manifest {
    std::string command;
    Inputs inputs;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> outputs;
    bool stamp = false;

    json to_json() const {
        json in = json::object();
        auto put = [&](const char* key, const std::string& path) {
            if (!path.empty()) in[key] = path;
        };
        put("catalog", inputs.catalog);
        put("model", inputs.model);
        put("device", inputs.device);
        put("appspec", inputs.appspec);
        json started = nullptr;
        if (stamp) {
            const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
            char buf[32];
            std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
            started = buf;
        }
        return {{"command", command},
                {"inputs", std::move(in)},
                {"seed", seed ? json(*seed) : json(nullptr)},
                {"tool_version", kVersion},
                {"started_at", std::move(started)},
                {"outputs", outputs},
                {"energy_scope", "FPGA only"},
                {"units", {{"time", "ms"},
                           {"power", "mW"},
                           {"energy", "mJ"},
                           {"frequency", "MHz"},
                           {"efficiency", "GOPS/W"},
                           {"efficiency_alias", "GOPS/s/W"}}}};
    }
};

void print_json(const json& doc) { std::cout << doc.dump(2) << '\n'; }

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + path + "'");
}

Workload parse_workload_arg(const std::string& spec) {
    try {
        return parse_workload_spec(spec);
    } catch (const ParseError& e) {
        throw UsageError(e.what());
    }
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) parts.push_back(item);
    return parts;
}

Rational parse_ms(std::string text) {
    if (text.size() > 2 && text.ends_with("ms")) text.resize(text.size() - 2);
    return parse_rational(text);
}

std::string require(const std::string& value, const char* flag) {
    if (value.empty()) throw UsageError(std::string("missing required option ") + flag);
    return value;
}

StrategyKind parse_strategy_arg(const std::string& text) {
    try {
        return parse_strategy(text);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

std::vector<Rational> parse_clock_list(const std::string& text) {
    std::vector<Rational> clocks;
    for (const auto& s : split(text, ',')) {
        try {
            clocks.push_back(parse_rational(s));
        } catch (const ParseError&) {
            throw UsageError("bad clock '" + s + "'");
        }
    }
    return clocks;
}

std::string catalog_path(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("FPGADSE_CATALOG"); env && *env) return env;
    throw UsageError("no catalog given: pass --catalog or set FPGADSE_CATALOG");
}


std::string fmt4(const Rational& v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", round_significant(v));
    return buf;
}

struct PlotData {
    std::string text = "series,key,value\n";
    void add(const std::string& series, const std::string& key, const std::string& value) {
        text += series + "," + key + "," + value + "\n";
    }
};

// --- validate ---------------------------------------------------------------

int cmd_validate(const Inputs& in, const std::string& trace) {
    int status = kOk;
    int checked = 0, ok = 0;
    auto check = [&](const std::string& path, const char* what, auto&& loader) {
        if (path.empty()) return;
        ++checked;
        try {
            loader(path);
            ++ok;
        } catch (const IoError& e) {
            std::cerr << path << ": " << e.what() << '\n';
            if (status == kOk) status = kIo;
        } catch (const NonPositiveGap& e) {
            std::cerr << path << ": " << e.what() << '\n';
            if (status == kOk) status = kData;
        } catch (const EmptyTrace& e) {
            std::cerr << path << ": " << e.what() << '\n';
            if (status == kOk) status = kData;
        } catch (const Error& e) {
            std::cerr << path << ": " << what << ": " << e.what() << '\n';
            if (status == kOk) status = kInvalid;
        }
    };
    check(in.catalog, "catalog", [](const std::string& p) { load_catalog(p); });
    check(in.model, "model", [](const std::string& p) { load_model(p); });
    check(in.device, "device", [](const std::string& p) { load_device(p); });
    check(in.appspec, "appspec", [](const std::string& p) { load_appspec(p); });
    check(trace, "trace", [](const std::string& p) { load_trace(p); });
    if (checked == 0) throw UsageError("validate needs at least one file");
    if (status == kOk) {
        std::cout << ok << (ok == 1 ? " file ok" : " files ok") << '\n';
    } else {
        std::cerr << ok << " of " << checked << " files ok\n";
    }
    return status;
}

// --- estimate ---------------------------------------------------------------

struct EstimateArgs {
    std::string assign;
    std::string clock;
    std::string strategy = "idle";
    bool csv = false;
};

int cmd_estimate(Manifest& manifest, const EstimateArgs& args) {
    const Catalog catalog = load_catalog(manifest.inputs.catalog);
    const NetworkModel model = load_model(require(manifest.inputs.model, "--model"));
    const FpgaDevice device = load_device(require(manifest.inputs.device, "--device"));
    const ApplicationSpec appspec =
        manifest.inputs.appspec.empty() ? ApplicationSpec{} : load_appspec(manifest.inputs.appspec);
    std::optional<Rational> clock;
    if (!args.clock.empty()) clock = parse_clock_list(args.clock).at(0);
    const CandidateConfig config =
        candidate_from_assignment(catalog, model, device, args.assign, clock, parse_strategy_arg(args.strategy));

    EvalReport report;
    try {
        report = estimate(model, device, config, appspec);
    } catch (const InfeasibleFrequency& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    }
    if (args.csv) {
        std::cout << eval_csv_header() << '\n' << eval_csv_row(report) << '\n';
    } else {
        json doc;
        doc["manifest"] = manifest.to_json();
        doc["candidate"] = to_json(config);
        doc["report"] = to_json(report);
        const BreakEven be = break_even_period(report, device);
        doc["break_even_period_ms"] = be.infinite ? json(nullptr) : json(round_significant(be.period));
        doc["break_even_infinite"] = be.infinite;
        print_json(doc);
    }
    if (!report.feasible) {
        std::string names;
        for (const auto& v : report.violations) names += (names.empty() ? "" : ", ") + v.constraint;
        std::cerr << "infeasible candidate: " << names << '\n';
        return kInfeasible;
    }
    return kOk;
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
    EstimateArgs candidate;
    std::string workload;
    std::int64_t requests = 0;
    std::string deadline;
    bool compare = false;
    std::string emit_theta;
    std::string plot_data;
};

std::vector<StrategyKind> comparison_strategies(const StrategyKind& requested, const EvalReport& report,
                                                const FpgaDevice& device) {
    std::vector<StrategyKind> out{StrategyKind::on_off(), StrategyKind::idle_waiting(),
                                  StrategyKind::clock_aligned()};
    const BreakEven be = break_even_period(report, device);
    if (!be.infinite) out.push_back(StrategyKind::adaptive_predefined(be.period));
    out.push_back(requested.type == StrategyType::Adaptive ? requested : default_adaptive());
    return out;
}

int cmd_simulate(Manifest& manifest, const SimulateArgs& args) {
    const Catalog catalog = load_catalog(manifest.inputs.catalog);
    const NetworkModel model = load_model(require(manifest.inputs.model, "--model"));
    const FpgaDevice device = load_device(require(manifest.inputs.device, "--device"));
    ApplicationSpec appspec = manifest.inputs.appspec.empty() ? ApplicationSpec{} : load_appspec(manifest.inputs.appspec);
    if (!args.workload.empty()) {
        appspec.workload = parse_workload_arg(args.workload);
    } else if (manifest.inputs.appspec.empty()) {
        throw UsageError("simulate needs --workload or --appspec");
    }
    if (const auto* s = std::get_if<StochasticWorkload>(&appspec.workload)) manifest.seed = s->seed;
    const std::int64_t requests = args.requests > 0 ? args.requests : appspec.requests.value_or(100);
    std::optional<Rational> deadline = appspec.latency_deadline;
    if (!args.deadline.empty()) deadline = parse_ms(args.deadline);

    std::optional<Rational> clock;
    if (!args.candidate.clock.empty()) clock = parse_clock_list(args.candidate.clock).at(0);
    const StrategyKind requested = parse_strategy_arg(args.candidate.strategy);
    CandidateConfig config = candidate_from_assignment(catalog, model, device, args.candidate.assign, clock, requested);
    const std::vector<Rational> gaps = generate_gaps(appspec.workload, requests);

    std::vector<StrategyKind> strategies{requested};
    ApplicationSpec estimate_spec = appspec;
    estimate_spec.latency_deadline.reset();
    const EvalReport base = estimate(model, device, config, estimate_spec);
    if (args.compare) strategies = comparison_strategies(requested, base, device);

    std::vector<SimResult> results;
    for (const auto& s : strategies) {
        config.strategy = s;
        results.push_back(simulate(model, device, config, gaps, deadline));
    }

    if (!args.emit_theta.empty()) manifest.outputs.push_back(args.emit_theta);
    if (!args.plot_data.empty()) manifest.outputs.push_back(args.plot_data);

    json doc;
    doc["manifest"] = manifest.to_json();
    doc["workload"] = to_json(appspec)["workload"];
    doc["requests"] = gaps.size();
    config.strategy = requested;
    doc["candidate"] = to_json(config);
    if (!args.compare) {
        doc["result"] = to_json(results.front());
    } else {
        json rows = json::array();
        json all = json::array();
        const SimResult& onoff = results.front();
        for (const auto& r : results) {
            const Rational ratio = onoff.energy_per_item / r.energy_per_item;
            rows.push_back({{"strategy", r.strategy},
                            {"energy_per_item_mj", round_significant(r.energy_per_item)},
                            {"steady_energy_per_item_mj", round_significant(r.steady_energy_per_item)},
                            {"items_per_energy_vs_onoff", round_significant(ratio)}});
            all.push_back(to_json(r));
        }
        doc["results"] = std::move(all);
        doc["comparison"] = std::move(rows);
        const ThresholdChoice offline = learn_threshold_offline(gaps, base, device);
        doc["offline_threshold"] = {{"theta_ms", round_significant(offline.theta)},
                                    {"hindsight_energy_mj", round_significant(offline.total_energy)},
                                    {"theta_exact", to_exact_string(offline.theta)}};

        std::cerr << "strategy                                    mJ/item   steady    x items vs OnOff\n";
        for (const auto& r : results) {
            char line[160];
            std::snprintf(line, sizeof line, "%-42s %9s %8s %10s\n", r.strategy.c_str(),
                          fmt4(r.energy_per_item).c_str(), fmt4(r.steady_energy_per_item).c_str(),
                          fmt4(onoff.energy_per_item / r.energy_per_item).c_str());
            std::cerr << line;
        }
    }

    if (!args.emit_theta.empty()) {
        const SimResult* learned = nullptr;
        for (const auto& r : results) {
            if (!r.theta_trajectory.empty()) learned = &r;
        }
        if (!learned) throw UsageError("--emit-theta needs an adaptive strategy");
        write_file(args.emit_theta, theta_csv(*learned));
    }
    if (!args.plot_data.empty()) {
        PlotData plot;
        for (const auto& r : results) {
            plot.add(r.strategy, "energy_per_item_mj", fmt4(r.energy_per_item));
            plot.add(r.strategy, "steady_energy_per_item_mj", fmt4(r.steady_energy_per_item));
            plot.add(r.strategy, "total_energy_mj", fmt4(r.total_energy));
            plot.add(r.strategy, "reconfigurations", std::to_string(r.reconfigurations));
            plot.add(r.strategy, "missed_deadlines", std::to_string(r.missed_deadlines));
            for (const auto& [event, theta] : r.theta_trajectory) {
                plot.add("theta:" + r.strategy, std::to_string(event), fmt4(theta));
            }
        }
        write_file(args.plot_data, plot.text);
    }
    print_json(doc);
    return kOk;
}

// --- explore ----------------------------------------------------------------

struct ExploreArgs {
    std::string algo = "exhaustive";
    std::size_t top = 5;
    std::string pareto;
    bool csv = false;
    unsigned jobs = 1;
    std::string clocks;
    std::string clock_step;
    std::string strategies;
    std::uint64_t cap = 1'000'000;
    std::string plot_data;
};

int cmd_explore(Manifest& manifest, const ExploreArgs& args) {
    const Catalog catalog = load_catalog(manifest.inputs.catalog);
    const NetworkModel model = load_model(require(manifest.inputs.model, "--model"));
    const FpgaDevice device = load_device(require(manifest.inputs.device, "--device"));
    const ApplicationSpec appspec = load_appspec(require(manifest.inputs.appspec, "--appspec"));
    if (const auto* s = std::get_if<StochasticWorkload>(&appspec.workload)) manifest.seed = s->seed;

    SpaceOptions opts;
    if (!args.clocks.empty()) opts.clocks = parse_clock_list(args.clocks);
    if (!args.clock_step.empty()) opts.clock_step = parse_clock_list(args.clock_step).at(0);
    if (!args.strategies.empty()) {
        std::vector<StrategyKind> list;
        for (const auto& s : split(args.strategies, ',')) list.push_back(parse_strategy_arg(s));
        opts.strategies = std::move(list);
    }
    const DesignSpace space = enumerate_space(catalog, model, device, opts);
    SearchOptions search{args.cap, args.top, std::max(1u, args.jobs)};

    if (!args.pareto.empty()) manifest.outputs.push_back(args.pareto);
    if (!args.plot_data.empty()) manifest.outputs.push_back(args.plot_data);

    auto emit = [&](const SearchOutcome& outcome) {
        if (!args.pareto.empty()) write_file(args.pareto, pareto_csv(outcome));
        if (!args.plot_data.empty()) {
            PlotData plot;
            for (std::size_t i = 0; i < outcome.pareto.size(); ++i) {
                const auto& e = outcome.pareto[i];
                const std::string series = "pareto:" + std::to_string(i);
                plot.add(series, "energy_per_item_mj", fmt4(*e.report.energy_per_item));
                plot.add(series, "t_inf_ms", fmt4(e.report.t_inf));
                plot.add(series, "lut", std::to_string(e.report.resources.lut));
            }
            for (std::size_t i = 0; i < outcome.ranked.size(); ++i) {
                const auto& e = outcome.ranked[i];
                plot.add("ranked:" + std::to_string(i + 1), "objective", fmt4(*e.objective));
            }
            write_file(args.plot_data, plot.text);
        }
        if (args.csv) {
            std::cout << ranked_csv(outcome);
        } else {
            json doc;
            doc["manifest"] = manifest.to_json();
            doc["outcome"] = to_json(outcome);
            print_json(doc);
        }
    };

    try {
        SearchOutcome outcome;
        if (args.algo == "exhaustive") {
            outcome = search_exhaustive(space, model, device, appspec, search);
        } else if (args.algo == "bnb") {
            outcome = search_branch_and_bound(space, model, device, appspec, search);
        } else {
            throw UsageError("--algo must be exhaustive or bnb");
        }
        emit(outcome);
        return kOk;
    } catch (const NoFeasibleCandidate& e) {
        emit(e.outcome());
        std::cerr << e.what() << '\n';
        for (const auto& [name, count] : e.outcome().violation_counts) {
            std::cerr << "  " << name << ": violated by " << count << " candidates\n";
        }
        return kNoFeasible;
    }
}

// --- sweep ------------------------------------------------------------------

int cmd_sweep(Manifest& manifest, const std::string& variant, const std::string& reference) {
    const Catalog catalog = load_catalog(manifest.inputs.catalog);
    const TemplateProfile* p = catalog.find(TemplateKind::Activation, variant);
    if (!p) p = catalog.find_any(variant);
    if (!p) throw ValidationError("no variant '" + variant + "' in catalog");
    ErrorReference ref;
    if (reference == "real") {
        ref = ErrorReference::RealValued;
    } else if (reference == "fixed") {
        ref = ErrorReference::FixedPointDefinition;
    } else {
        throw UsageError("--reference must be real or fixed");
    }
    const ErrorStats stats = precision_error_sweep(*p, ref);
    json doc;
    doc["manifest"] = manifest.to_json();
    doc["variant"] = variant;
    doc["reference"] = reference == "real" ? "RealValued" : "FixedPointDefinition";
    doc["inputs"] = stats.inputs;
    doc["max_abs_error"] = round_significant(stats.max_abs_error);
    doc["mean_abs_error"] = round_significant(stats.mean_abs_error);
    doc["worst_raw_input"] = stats.worst_raw_input;
    doc["exact"] = {{"max_abs_error", to_exact_string(stats.max_abs_error)},
                    {"mean_abs_error", to_exact_string(stats.mean_abs_error)}};
    print_json(doc);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FPGA accelerator design-space exploration"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Inputs in;
    bool stamp = false;
    auto add_inputs = [&](CLI::App* sub, bool with_catalog) {
        if (with_catalog) sub->add_option("--catalog", in.catalog, "Catalog JSON (default: $FPGADSE_CATALOG)");
        sub->add_option("--model", in.model, "Network model JSON");
        sub->add_option("--device", in.device, "FPGA device JSON");
        sub->add_option("--appspec", in.appspec, "Application spec JSON");
        sub->add_flag("--stamp", stamp, "Record the wall-clock start time in the manifest");
    };

    std::string validate_trace;
    auto* validate = app.add_subcommand("validate", "Parse and validate input files");
    validate->add_option("--catalog", in.catalog, "Catalog JSON");
    validate->add_option("--model", in.model, "Network model JSON");
    validate->add_option("--device", in.device, "FPGA device JSON");
    validate->add_option("--appspec", in.appspec, "Application spec JSON");
    validate->add_option("--trace", validate_trace, "Plain-text gap trace");

    EstimateArgs est;
    auto add_candidate = [](CLI::App* sub, EstimateArgs& a) {
        sub->add_option("--assign", a.assign, "Per-layer variants: layer_id[+activation_id],...");
        sub->add_option("--clock", a.clock, "Clock in MHz (default: highest allowed)");
        sub->add_option("--strategy", a.strategy,
                        "onoff | idle | clock | adaptive | adaptive:predefined:T | adaptive:learnable:T0[:ETA]");
    };
    auto* estimate_cmd = app.add_subcommand("estimate", "Evaluate one candidate analytically");
    add_inputs(estimate_cmd, true);
    add_candidate(estimate_cmd, est);
    estimate_cmd->add_flag("--csv", est.csv, "CSV header and row instead of JSON");

    SimulateArgs sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Discrete-event simulation of a workload");
    add_inputs(simulate_cmd, true);
    add_candidate(simulate_cmd, sim.candidate);
    simulate_cmd->add_option("--workload", sim.workload,
                             "regular:40ms | trace:PATH | exp:MEAN,SEED | bimodal:P,SMIN,SMAX,LMIN,LMAX,SEED");
    simulate_cmd->add_option("--requests", sim.requests, "Request count for generated workloads (default 100)");
    simulate_cmd->add_option("--deadline", sim.deadline, "Response deadline in ms");
    simulate_cmd->add_flag("--compare", sim.compare, "Run every strategy on the same gaps");
    simulate_cmd->add_option("--emit-theta", sim.emit_theta, "Write the threshold trajectory CSV");
    simulate_cmd->add_option("--plot-data", sim.plot_data, "Write long-format CSV for plotting");

    ExploreArgs exp;
    auto* explore_cmd = app.add_subcommand("explore", "Search the design space");
    add_inputs(explore_cmd, true);
    explore_cmd->add_option("--algo", exp.algo, "exhaustive | bnb")->check(CLI::IsMember({"exhaustive", "bnb"}));
    explore_cmd->add_option("--top", exp.top, "Ranked list length");
    explore_cmd->add_option("--pareto", exp.pareto, "Write the Pareto frontier CSV");
    explore_cmd->add_flag("--csv", exp.csv, "Ranked list as CSV instead of JSON");
    explore_cmd->add_option("--jobs", exp.jobs, "Worker threads for exhaustive search");
    explore_cmd->add_option("--clocks", exp.clocks, "Explicit clock list in MHz, comma separated");
    explore_cmd->add_option("--clock-step", exp.clock_step, "Clock grid step in MHz (default 25)");
    explore_cmd->add_option("--strategies", exp.strategies, "Strategy list, comma separated");
    explore_cmd->add_option("--cap", exp.cap, "Maximum design-space size");
    explore_cmd->add_option("--plot-data", exp.plot_data, "Write long-format CSV for plotting");

    std::string sweep_variant, sweep_reference = "fixed";
    auto* sweep_cmd = app.add_subcommand("sweep", "Exhaustive precision sweep of an activation variant");
    sweep_cmd->add_option("--catalog", in.catalog, "Catalog JSON (default: $FPGADSE_CATALOG)");
    sweep_cmd->add_option("--variant", sweep_variant, "Activation variant id")->required();
    sweep_cmd->add_option("--reference", sweep_reference, "real | fixed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    Manifest manifest;
    manifest.inputs = in;
    manifest.stamp = stamp;
    try {
        if (validate->parsed()) return cmd_validate(in, validate_trace);
        manifest.inputs.catalog = catalog_path(in.catalog);
        if (estimate_cmd->parsed()) {
            manifest.command = "estimate";
            return cmd_estimate(manifest, est);
        }
        if (simulate_cmd->parsed()) {
            manifest.command = "simulate";
            return cmd_simulate(manifest, sim);
        }
        if (explore_cmd->parsed()) {
            manifest.command = "explore";
            return cmd_explore(manifest, exp);
        }
        manifest.command = "sweep";
        return cmd_sweep(manifest, sweep_variant, sweep_reference);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const NonPositiveGap& e) {
        std::cerr << "trace error: " << e.what() << '\n';
        return kData;
    } catch (const EmptyTrace& e) {
        std::cerr << "trace error: " << e.what() << '\n';
        return kData;
    } catch (const SpaceTooLarge& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kTooLarge;
    } catch (const InfeasibleFrequency& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    }
}
